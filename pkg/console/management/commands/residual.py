import logging

from edge.asymptotics import SOURCE_PAINLEVE, constant_fit, slope_fit
from edge.schemas import ResidualRow
from numerics.exceptions import DomainError

from console.base import TracyCommand
from console.renderers import render_table
from console.serializers import ResidualConfigSerializer
from console.sweeps import run_sweep, tw_solution
from console.tasks import residual_point_task

logger = logging.getLogger(__name__)

RESIDUAL_COLUMNS = ['param', 'computed', 'rhs', 'residual']


def _fit_or_none(fit, rows):
    try:
        return fit(rows).model_dump()
    except DomainError as e:
        logger.warning(f"{fit.__name__} skipped: {e}")
        return None


class Command(TracyCommand):
    help = "ln det(I - K_s) against -s**3/12 - ln(s)/8 + chi over a grid of s"
    serializer_class = ResidualConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--source', help="painleve or fredholm")
        parser.add_argument('--s-grid', help="lo:hi:step with lo > 0")
        parser.add_argument('--nodes', help="Nystrom nodes for the fredholm source")
        parser.add_argument('--precision', help="native or dd for the fredholm source")

    def run(self, config, echo):
        if config['source'] == SOURCE_PAINLEVE:
            tw_solution()
        points = [(config['source'], s, config['nodes'], config['precision']) for s in config['s_grid'].points]
        rows = run_sweep(residual_point_task, points, config['threads'])
        records = [ResidualRow(**row) for row in rows]
        extra = {
            'fit': _fit_or_none(slope_fit, records),
            'constant_fit': _fit_or_none(constant_fit, records),
        }
        return render_table(RESIDUAL_COLUMNS, rows, config['format'], echo, extra)

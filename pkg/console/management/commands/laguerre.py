from laguerre.products import dint2_limit, products_report

from console.base import TracyCommand
from console.renderers import render_record, render_table
from console.serializers import ACTION_DDLOG, ACTION_EDGE, ACTION_EXACT, ACTION_GAP, LaguerreConfigSerializer
from console.sweeps import run_sweep
from console.tasks import edge_gap_task, laguerre_ddlog_task, laguerre_gap_task

GAP_COLUMNS = ['n', 'alpha', 'log_det', 'route']
DDLOG_COLUMNS = ['n', 'alpha', 'rank1', 'cd', 'recurrence', 'lemma2_rhs', 'rho']


class Command(TracyCommand):
    help = "Laguerre-ensemble gap probability D_n(alpha): gap, ddlog, edge or exact"
    serializer_class = LaguerreConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument('action', nargs='?', help="gap (default), ddlog, edge or exact")
        super().add_arguments(parser)
        parser.add_argument('--n', help="matrix size")
        parser.add_argument('--alpha', help="left end of the gap (alpha, inf)")
        parser.add_argument('--alpha-grid', help="lo:hi:step sweep over alpha for gap and ddlog")
        parser.add_argument('--s', help="edge-scaled gap parameter for edge")
        parser.add_argument('--route', help="auto, gram, theta or recurrence")
        parser.add_argument('--nodes', help="quadrature nodes for the gram and recurrence routes")
        parser.add_argument('--centered', action='store_true', help="use the 1/(2n)-shifted edge point")

    def _alpha_sweep(self, task, columns, config, echo, extra_args):
        n = config['n']
        grid = config.get('alpha_grid')
        alphas = grid.points if grid else [config['alpha']]
        rows = run_sweep(task, [(n, alpha, *extra_args) for alpha in alphas], config['threads'])
        if grid is None:
            return render_record({column: rows[0][column] for column in columns}, config['format'], echo)
        return render_table(columns, rows, config['format'], echo)

    def run(self, config, echo):
        action = config['action']
        nodes = config.get('nodes')
        if action == ACTION_GAP:
            return self._alpha_sweep(laguerre_gap_task, GAP_COLUMNS, config, echo, (config['route'], nodes))
        if action == ACTION_DDLOG:
            return self._alpha_sweep(laguerre_ddlog_task, DDLOG_COLUMNS, config, echo, (nodes,))
        if action == ACTION_EDGE:
            record = edge_gap_task.apply(args=(config['n'], config['s'], nodes, config['centered'])).get()
            return render_record(record, config['format'], echo)
        if action == ACTION_EXACT:
            record = products_report(config['n']).model_dump()
            record['dint2_limit'] = dint2_limit(config['n'])
            return render_record(record, config['format'], echo)
        raise ValueError(f"Unhandled action {action!r}")

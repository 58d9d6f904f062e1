from edge.fredholm import airy_gap_log_det

from console.base import TracyCommand
from console.renderers import render_record
from console.serializers import GapConfigSerializer


class Command(TracyCommand):
    help = "ln det(I - K_s) of the Airy kernel on (-s, inf) by Nystrom discretisation"
    serializer_class = GapConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--s', help="the excluded interval is (-s, inf)")
        parser.add_argument('--nodes', help="Gauss-Legendre nodes (at least 20)")
        parser.add_argument('--precision', help="native or dd")

    def run(self, config, echo):
        result = airy_gap_log_det(config['s'], config['nodes'], config['precision'])
        record = {
            's': result.s,
            'log_det': result.log_det,
            'est_error': result.est_error,
            'nodes': result.node_count,
            'precision': result.precision,
        }
        return render_record(record, config['format'], echo)

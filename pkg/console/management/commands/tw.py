from console.base import TracyCommand
from console.renderers import render_table
from console.serializers import TWConfigSerializer
from console.sweeps import run_sweep, tw_solution
from console.tasks import tw_point_task

TW_COLUMNS = ['x', 'log_cdf', 'cdf']


class Command(TracyCommand):
    help = "Tracy-Widom F(x) from the Hastings-McLeod solution over a grid lo:hi:step"
    serializer_class = TWConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--x-grid', help="lo:hi:step, endpoints inclusive")

    def run(self, config, echo):
        # built once here so worker threads share the cached table
        tw_solution()
        points = [(x,) for x in config['x_grid'].points]
        rows = run_sweep(tw_point_task, points, config['threads'])
        return render_table(TW_COLUMNS, rows, config['format'], echo)

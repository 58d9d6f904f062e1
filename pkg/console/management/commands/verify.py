import argparse

from console.acceptance import run_suite
from console.base import TracyCommand, VerificationFailed
from console.renderers import render_json
from console.serializers import VerifyConfigSerializer


class Command(TracyCommand):
    help = "Run the acceptance suite (quick or full) and emit a JSON report"
    serializer_class = VerifyConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--suite', help="quick or full")
        parser.add_argument('--chi-offset', help=argparse.SUPPRESS)

    def summary(self, report):
        for criterion in report.criteria:
            status = 'pass' if criterion.passed else 'FAIL'
            self.stderr.write(f"{criterion.name:<22} {status:<5} {criterion.measured}")
        self.stderr.write(f"suite {report.suite}: {'pass' if report.passed else 'FAIL'}")

    def run(self, config, echo):
        report = run_suite(config['suite'], config['chi_offset'])
        self.summary(report)
        text = render_json({**report.model_dump(), 'config': echo})
        if not report.passed:
            failed = ', '.join(criterion.name for criterion in report.criteria if not criterion.passed)
            raise VerificationFailed(f"Verification failed: {failed}", text)
        return text

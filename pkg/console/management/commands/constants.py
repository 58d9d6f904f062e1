from numerics.specfun import chi_constant

from console.base import TracyCommand
from console.renderers import render_record
from console.serializers import ConstantsConfigSerializer


class Command(TracyCommand):
    help = "zeta'(-1) and chi = ln(2)/24 + zeta'(-1) in double-double, rounded to binary64"
    serializer_class = ConstantsConfigSerializer

    def run(self, config, echo):
        return render_record(chi_constant().model_dump(), config['format'], echo)

import math

from pydantic import BaseModel, ConfigDict, model_validator

CONSTANTS_METHOD = 'zeta2-euler-maclaurin'


class Constants(BaseModel):
    model_config = ConfigDict(frozen=True)

    zeta_prime_minus1: float
    chi: float
    method: str = CONSTANTS_METHOD

    @model_validator(mode='after')
    def check_chi_offset(self):
        offset = self.chi - self.zeta_prime_minus1
        if abs(offset - math.log(2.0) / 24.0) > 1e-15:
            raise ValueError(f"chi - zeta'(-1) = {offset!r} is not ln(2)/24")
        return self

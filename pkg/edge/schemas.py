import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

# det(I - A) may round a hair above one when the excluded interval sits deep in the decay region
LOG_DET_SLACK = 1e-13


class TWPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    log_cdf: float
    cdf: float

    @model_validator(mode='after')
    def check_probability(self):
        if self.log_cdf > 0.0:
            raise ValueError(f"log_cdf {self.log_cdf} is positive")
        if not 0.0 < self.cdf <= 1.0:
            raise ValueError(f"cdf {self.cdf} outside (0, 1]")
        return self


class GapDeterminant(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float
    log_det: float
    node_count: int
    est_error: float
    precision: str

    @model_validator(mode='after')
    def check_sign(self):
        if self.log_det > LOG_DET_SLACK:
            raise ValueError(f"log_det {self.log_det} is positive")
        return self


class ResidualRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    param: float
    computed: float
    rhs: float
    residual: float
    rho: Optional[float] = None

    @classmethod
    def build(cls, param: float, computed: float, rhs: float, rho: Optional[float] = None):
        return cls(param=param, computed=computed, rhs=rhs, residual=computed - rhs, rho=rho)

    @model_validator(mode='after')
    def check_residual(self):
        if self.residual != self.computed - self.rhs:
            raise ValueError("residual must equal computed - rhs")
        return self


class SlopeFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    rms: float
    used: int
    excluded: int = 0

    @model_validator(mode='after')
    def check_rms(self):
        if self.rms < 0.0 or math.isnan(self.rms):
            raise ValueError(f"invalid rms {self.rms}")
        return self

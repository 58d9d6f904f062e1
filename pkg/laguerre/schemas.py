from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from numerics.extprec import DDouble


class ExactProducts(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    ln_A_n: DDouble
    ln_C_n: DDouble

    @field_validator('n')
    @classmethod
    def validate_n(cls, value):
        if value < 1:
            raise ValueError(f"n={value} must be positive")
        return value


class GapValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    alpha: float
    log_det: float
    route: str

    @model_validator(mode='after')
    def check_sign(self):
        if self.log_det > 1e-12:
            raise ValueError(f"ln D_n = {self.log_det} is positive")
        return self


class DerivativeRoutes(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    alpha: float
    rank1: float
    cd: Optional[float] = None
    recurrence: Optional[float] = None
    lemma2_rhs: Optional[float] = None
    rho: Optional[float] = None


class EdgeGap(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    s: float
    alpha: float
    centered: bool
    gap: float
    limit: float
    error: float


class ProductsReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    ln_A_n: float
    ln_C_n: float
    aas_residual: float
    cas_residual: float

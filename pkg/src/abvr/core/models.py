from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Method = Literal["DIFF", "CUPED", "CUPAC", "COMBINED"]
Severity = Literal["error", "warning"]


class ColumnSchema(BaseModel):
    """Соглашение об именах колонок во входном CSV"""

    model_config = ConfigDict(frozen=True)

    treatment: str = "w"
    outcome: str = "y"
    pre_prefix: str = "x_"
    in_prefix: str = "z_"
    unit_id: str = "unit_id"


class ValidationIssue(BaseModel):
    model_config = ConfigDict(frozen=True)

    severity: Severity
    column: Optional[str] = None
    message: str


class ValidationReport(BaseModel):
    """Результат диагностики датасета"""

    issues: List[ValidationIssue] = Field(default_factory=list)
    missing_fraction_per_x_column: Dict[str, float] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(issue.severity == "error" for issue in self.issues)

    @property
    def errors(self) -> List[ValidationIssue]:
        return [issue for issue in self.issues if issue.severity == "error"]


class GbtHyperparams(BaseModel):
    """Гиперпараметры градиентного бустинга"""

    model_config = ConfigDict(frozen=True)

    n_trees: int = Field(default=100, ge=1)
    max_depth: int = Field(default=3, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0, le=1.0)
    min_samples_leaf: int = Field(default=20, ge=1)
    n_split_candidates: int = Field(default=32, ge=1)


class EstimateReport(BaseModel):
    """Оценка ATE одним методом"""

    method: Method
    tau_hat: float
    sigma2_hat: float = Field(ge=0.0)
    se: float
    ci_low: float
    ci_high: float
    level: float
    n: int
    n1: int
    n0: int
    r2_model: Optional[float] = None
    gamma_hat: Optional[List[float]] = None
    theta_hat: Optional[List[float]] = None
    z_names: Optional[List[str]] = None
    rank_deficient: bool = False
    ridge_used: float = 0.0


class ComparisonMetrics(BaseModel):
    """Метрики сравнения: прирост sqrt(R^2) и доли снижения дисперсии"""

    sqrt_r2_gain: float
    vr_cupac_vs_diff: float
    vr_combined_vs_cupac: float


class SelectionConfig(BaseModel):
    """Параметры отбора in-experiment ковариат"""

    model_config = ConfigDict(frozen=True)

    alpha: float = 0.05
    test: Literal["welch_t", "mann_whitney"] = "mann_whitney"
    correction: Literal["none", "bonferroni", "holm"] = "none"
    min_nonzero_fraction: float = 0.01

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {v}")
        return v

    @field_validator("min_nonzero_fraction")
    @classmethod
    def validate_fraction(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"min_nonzero_fraction must lie in [0, 1], got {v}")
        return v


class SelectionResult(BaseModel):
    """Результат отбора ковариат"""

    per_experiment_pvalues: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    combined_pvalues: Dict[str, float] = Field(default_factory=dict)
    adjusted_pvalues: Dict[str, float] = Field(default_factory=dict)
    selected: List[str] = Field(default_factory=list)
    rejected: List[str] = Field(default_factory=list)
    filtered_out: List[str] = Field(default_factory=list)


class DGPConfig(BaseModel):
    """Параметры аддитивной модели Y = g(X) + h(Z) + tau*W + eps"""

    d: int = Field(ge=0)
    m: int = Field(ge=0)
    beta_g: List[float]
    beta_h: List[float]
    h_kind: Literal["linear", "cubic"] = "linear"
    tau: float = 0.0
    p: float = 0.5
    sigma_eps: float = Field(default=1.0, ge=0.0)
    rho: float = Field(default=0.0, ge=-1.0, le=1.0)
    seed: int = 0
    z_shift: List[float] = Field(default_factory=list)

    @field_validator("p")
    @classmethod
    def validate_p(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {v}")
        return v

    @model_validator(mode="after")
    def check_dimensions(self) -> "DGPConfig":
        if len(self.beta_g) != self.d:
            raise ValueError(f"beta_g has {len(self.beta_g)} entries, expected d={self.d}")
        if len(self.beta_h) != self.m:
            raise ValueError(f"beta_h has {len(self.beta_h)} entries, expected m={self.m}")
        if self.z_shift and len(self.z_shift) != self.m:
            raise ValueError(f"z_shift has {len(self.z_shift)} entries, expected m={self.m}")
        return self

    @property
    def shift(self) -> List[float]:
        return list(self.z_shift) if self.z_shift else [0.0] * self.m

    @property
    def is_shifted(self) -> bool:
        return any(s != 0.0 for s in self.shift)


class OracleVariances(BaseModel):
    """Теоретические дисперсии остатков для аддитивной модели"""

    v_diff: float
    v_cupac: float
    v_combined: float
    inflation: float
    sigma2_diff: float
    sigma2_cupac: float
    sigma2_combined: float
    gamma: List[float]
    approximate: bool = False


class MCCell(BaseModel):
    """Агрегат по репликациям для пары (метод, n)"""

    method: Method
    n: int
    mean_tau_hat: float
    tau_hat_sd: float
    var_sqrt_n_tau_hat: float
    mean_sigma2_hat: float
    coverage: float = Field(ge=0.0, le=1.0)
    replications: int


class MCErrorPoint(BaseModel):
    n: int
    mean_error: float


class MCSelectionPanel(BaseModel):
    n: int
    selection_rate: Dict[str, float]
    exact_recovery_rate: float


class MCReport(BaseModel):
    """Результаты Monte Carlo"""

    config: DGPConfig
    n_grid: List[int]
    replications: int
    methods: List[Method]
    predictor_mode: Literal["oracle_f", "fit_linear", "fit_gbt"]
    level: float
    true_ate: float
    cells: List[MCCell] = Field(default_factory=list)
    gamma_errors: List[MCErrorPoint] = Field(default_factory=list)
    gamma_error_slope: Optional[float] = None
    f_errors: List[MCErrorPoint] = Field(default_factory=list)
    selection: List[MCSelectionPanel] = Field(default_factory=list)
    oracle_variances: Optional[OracleVariances] = None

    def cell(self, method: str, n: int) -> MCCell:
        for c in self.cells:
            if c.method == method and c.n == n:
                return c
        raise KeyError(f"{method} at n={n}")


class RunManifest(BaseModel):
    """Сведения о запуске, встраиваются в каждый отчет CLI"""

    command: str
    config: Dict[str, object]
    input_digests: Dict[str, str] = Field(default_factory=dict)
    tool_version: str
    seeds: List[int] = Field(default_factory=list)
    duration_seconds: float = 0.0


class SimulationRequest(BaseModel):
    """Конфигурация команды simulate"""

    dgp: DGPConfig
    n_grid: List[int]
    replications: int
    methods: List[Method] = Field(default_factory=lambda: ["DIFF", "CUPED", "CUPAC", "COMBINED"])
    predictor_mode: Literal["oracle_f", "fit_linear", "fit_gbt"] = "oracle_f"
    level: float = 0.95
    selection: Optional[SelectionConfig] = None

    @field_validator("replications")
    @classmethod
    def validate_replications(cls, v: int) -> int:
        if v < 1:
            raise ValueError("replications must be ≥ 1")
        return v

    @field_validator("n_grid")
    @classmethod
    def validate_grid(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("n_grid must not be empty")
        if any(n < 4 for n in v):
            raise ValueError("every n in n_grid must be ≥ 4")
        return v

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {v}")
        return v

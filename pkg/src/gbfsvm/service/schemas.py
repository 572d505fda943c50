"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

# --- requests ---------------------------------------------------------------


class PsoParams(BaseModel):
    """Optimizer knobs shared by every training endpoint."""

    pop: int | None = Field(default=None, ge=1)
    iters: int = Field(default=1050, ge=1)
    inertia: float = 0.5
    c1: float = 1.6
    c2: float = 1.6
    penalty: float | None = Field(default=None, gt=0)


class BallsRequest(BaseModel):
    dataset: str
    label_column: str | int = -1
    purity: float = Field(default=0.9, gt=0.5, le=1.0)
    radius_mode: str = "mean_distance"
    epsilon: float = Field(default=1e-6, gt=0)
    membership_mode: str = "samples"
    normalize: bool = True
    noise: float = Field(default=0.0, ge=0.0, le=0.5)
    seed: int = 0


class TrainRequest(BaseModel):
    dataset: str
    label_column: str | int = -1
    model: str = "gbfsvm"
    C: float = Field(default=10.0, gt=0)
    purity: float = Field(default=0.9, gt=0.5, le=1.0)
    lam: float = Field(default=0.9, gt=0.0, le=1.0)
    noise: float = Field(default=0.0, ge=0.0, le=0.5)
    test_fraction: float = Field(default=0.3, gt=0.0, lt=1.0)
    runs: int = Field(default=1, ge=1)
    seed: int = 0
    radius_mode: str = "mean_distance"
    epsilon: float = Field(default=1e-6, gt=0)
    membership_mode: str = "samples"
    normalize: bool = True
    pso: PsoParams = PsoParams()


class BenchRequest(BaseModel):
    datasets: list[str] = ["synth:fourclass", "synth:breastcancer"]
    models: list[str] = ["svm", "fsvm", "gbsvm", "gbfsvm"]
    noise_levels: list[float] | None = None  # default: 0..0.30 in steps of 0.05
    label_column: str | int = -1
    C: float = Field(default=10.0, gt=0)
    purity: float | None = Field(default=None, gt=0.5, le=1.0)
    lam: float = Field(default=0.9, gt=0.0, le=1.0)
    runs: int = Field(default=4, ge=1)
    seed: int = 0
    test_fraction: float = Field(default=0.3, gt=0.0, lt=1.0)
    epsilon: float = Field(default=1e-6, gt=0)
    radius_mode: str = "mean_distance"
    membership_mode: str = "samples"
    pso: PsoParams = PsoParams()
    include_tables: bool = True


# --- responses --------------------------------------------------------------


class BallRecord(BaseModel):
    ball: int
    center: list[float]
    radius: float
    label: int
    purity: float
    membership: float | None
    size: int


class BallsResponse(BaseModel):
    dataset: str
    n: int
    d: int
    purity_threshold: float
    radius_mode: str
    noise: float
    n_balls: int
    wall_time: float
    balls: list[BallRecord]


class RunRecord(BaseModel):
    seed: int
    objective: float | None
    test_accuracy: float | None
    error: str | None


class TrainResponse(BaseModel):
    dataset: str
    model: str
    C: float
    purity_threshold: float | None
    lam: float | None
    noise: float
    n_train: int
    n_test: int
    units: int
    w: list[float]
    b: float
    objective: float
    feasibility_gap: float
    b_from_fallback: bool
    train_accuracy: float
    test_accuracy: float
    selected_seed: int
    runs: list[RunRecord]
    wall_time: float


class CellModel(BaseModel):
    dataset: str
    model: str
    noise: float
    accuracies: list[float]
    best_accuracy: float | None
    mean_accuracy: float | None
    wall_time: float
    units: int
    purity: float | None
    error: str | None


class BenchResponse(BaseModel):
    config: dict
    selected_purity: list[tuple[str, float, float]]
    cells: list[CellModel]
    markdown: str | None = None
    csv: str | None = None


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    type: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody

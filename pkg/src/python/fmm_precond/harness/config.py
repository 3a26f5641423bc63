from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import tomli
from humps.camel import case
from pydantic import ValidationError, root_validator, validator

from fmm_precond.bem.pipeline import InnerSolverMethod
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.problems import ProblemId
from fmm_precond.fmm.config import MAX_EPSILON, MIN_EPSILON, Backend
from fmm_precond.utils.errors import ConfigurationError
from fmm_precond.utils.serialization import CamelModel

CSV_COLUMNS = ['experiment', 'problem', 'element', 'h', 'kappa', 'mu', 'preconditioner', 'solver', 'epsilon', 'p',
               'theta', 'iterations', 'converged', 'final_residual', 'wall_time_s', 'notes']


class PreconditionerId(Enum):
    """
    Preconditioners that can fill a result table column.
    """

    FMM = 'fmm'
    """
    FMM-accelerated boundary-element preconditioner.
    """

    GMG = 'gmg'
    """
    Geometric multigrid V(2,2) cycle.
    """

    IC = 'ic'
    """
    Zero-fill incomplete Cholesky, shifted on breakdown.
    """

    NONE = 'none'
    """
    Unpreconditioned (identity).
    """

    @classmethod
    def _missing_(cls, value):
        # JSON reports carry member names
        return cls.__members__.get(str(value).upper())


class SolverId(Enum):
    """
    Outer Krylov solvers.
    """

    GMRES = 'gmres'
    """
    Right-preconditioned restarted GMRES.
    """

    BICGSTAB = 'bicgstab'
    """
    Right-preconditioned BiCGSTAB.
    """

    @classmethod
    def _missing_(cls, value):
        # JSON reports carry member names
        return cls.__members__.get(str(value).upper())


class ExperimentKind(Enum):
    """
    What a sweep produces.
    """

    SOLVE = 'SOLVE'
    """
    One Krylov solve per cell; rows of iteration counts.
    """

    SPECTRUM = 'SPECTRUM'
    """
    Dense spectra of A (and of M⁻¹A for each FMM precision); clustering metrics.
    """


class ExperimentConfig(CamelModel):
    """
    One sweep over mesh levels, wavenumbers and preconditioners. Defaults are the reference
    settings: tol 1e-6, maxit 20, p = 6, θ = 0.4 and a zero initial iterate.
    """

    experiment_id: str
    """
    Catalog identifier (E1-E8) or a free name for custom sweeps.
    """

    kind: ExperimentKind = ExperimentKind.SOLVE

    problem: ProblemId

    elements: List[ElementType] = [ElementType.Q1]

    h_values: List[float] = []
    """
    Mesh levels; a level h means round(1/h) cells per side on any domain.
    """

    kappas: Optional[List[float]]
    """
    Wavenumbers; crossed with h_values. Ignored for P4, which takes mus.
    """

    mus: Optional[List[float]]
    """
    P4 parameters μ, with κ = μ√2.
    """

    pairs: Optional[List[Tuple[float, float]]]
    """
    Explicit (h, κ) cells, used instead of the h × κ cross product when given.
    """

    preconditioners: List[PreconditionerId] = [PreconditionerId.FMM]

    solvers: List[SolverId] = [SolverId.GMRES]

    epsilons: List[float] = [1e-6]
    """
    FMM precisions; every FMM cell is repeated once per value.
    """

    p: Optional[int]
    """
    Explicit expansion order, overriding the one derived from epsilon.
    """

    theta: float = 0.4

    ncrit: int = 64

    backend: Backend = Backend.FMM

    inner_solver: InnerSolverMethod = InnerSolverMethod.LU

    tol: float = 1e-6

    maxit: int = 20

    restart: Optional[int]
    """
    GMRES restart length; maxit when not given, i.e. no restarts within the iteration cap.
    """

    out_dir: str = 'results'

    seed: int = 0

    threads: int = 1

    record_timings: bool = True
    """
    Whether wall times go into the CSV; without them reruns are byte-identical.
    """

    notes: Optional[str]
    """
    Free text describing the sweep, e.g. the table or figure it reproduces.
    """

    @validator('tol')
    def check_tol(cls, tol):
        if not 0 < tol < 1:
            raise ValueError('tol must lie in (0, 1)')
        return tol

    @validator('maxit', 'threads', 'ncrit')
    def check_positive(cls, value):
        if value < 1:
            raise ValueError('must be >= 1')
        return value

    @validator('theta')
    def check_theta(cls, theta):
        if not 0 < theta <= 1:
            raise ValueError('theta must lie in (0, 1]')
        return theta

    @validator('epsilons', each_item=True)
    def check_epsilon(cls, epsilon):
        if not MIN_EPSILON <= epsilon <= MAX_EPSILON:
            raise ValueError(f'FMM precisions must lie in [{MIN_EPSILON}, {MAX_EPSILON}]')
        return epsilon

    @validator('h_values', each_item=True)
    def check_h(cls, h):
        if not 0 < h <= 0.5:
            raise ValueError('mesh levels must lie in (0, 0.5]')
        return h

    @root_validator(skip_on_failure=True)
    def check_parameter_grid(cls, values):
        if values.get('pairs'):
            return values
        if not values.get('h_values'):
            raise ValueError('give h_values or explicit (h, kappa) pairs')
        if values.get('problem') is ProblemId.P4:
            if not values.get('mus'):
                raise ValueError('P4 sweeps need mus')
        elif not values.get('kappas'):
            raise ValueError('give kappas or explicit (h, kappa) pairs')
        return values

    def with_overrides(self, **overrides) -> 'ExperimentConfig':
        """
        Copy with the given fields replaced (None values are ignored) and revalidated.
        """
        data = self.dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.parse_obj(data)


class ExperimentCell(CamelModel):
    """
    One entry of a result table.
    """

    element: ElementType
    h: float
    kappa: float
    mu: Optional[float]
    preconditioner: PreconditionerId
    solver: SolverId
    epsilon: Optional[float]
    """
    FMM precision; only set for FMM cells.
    """

    def sort_key(self):
        return (self.element.value, -self.h, self.kappa, self.mu or 0.0, self.preconditioner.value,
                self.solver.value, -(self.epsilon or 0.0))


class ResultRow(CamelModel):
    """
    Outcome of one cell. A cell that did not converge within maxit (shown as a dash in the
    reference tables) has converged = False and iterations = maxit.
    """

    experiment: str
    problem: str
    element: str
    h: float
    kappa: float
    mu: Optional[float]
    preconditioner: str
    solver: str
    epsilon: Optional[float]
    p: Optional[int]
    theta: Optional[float]
    iterations: int
    converged: bool
    final_residual: Optional[float]
    wall_time_s: Optional[float]
    notes: str = ''
    """
    Failures, IC shifts and inner-solve warnings, separated by '; '.
    """

    residual_history: List[float] = []

    metadata: Dict[str, str] = {}


class SpectrumRow(CamelModel):
    """
    Clustering metrics of one spectrum, keyed by the operator it came from.
    """

    experiment: str
    problem: str
    h: float
    kappa: float
    operator: str
    """
    'A' for the FEM matrix, 'fmm' for the FMM-preconditioned M⁻¹A.
    """

    epsilon: Optional[float]
    n: int
    n_negative_real: int
    min_abs: float
    max_abs: float
    cluster_radius: float
    median_abs: float


def load_config(path, **overrides) -> ExperimentConfig:
    """
    Read a TOML experiment file: flat keys (snake or camel case) plus an optional ``[fmm]`` table
    holding epsilon(s), p, theta, ncrit and backend. Explicit overrides (CLI flags) win over the file.
    """
    path = Path(path)
    try:
        with path.open('rb') as f:
            data = tomli.load(f)
    except OSError as e:
        raise ConfigurationError(f'cannot read config {path}: {e}')
    except tomli.TOMLDecodeError as e:
        raise ConfigurationError(f'{path} is not valid TOML: {e}')
    fmm_table = data.pop('fmm', {})
    if 'epsilon' in fmm_table:
        fmm_table['epsilons'] = [fmm_table.pop('epsilon')]
    data.update(fmm_table)
    if 'experiment_id' not in data:
        data.setdefault('experimentId', path.stem)
    # aliases take precedence over field names when both are present
    data.update({case(k): v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig.parse_obj(data)
    except ValidationError as e:
        raise ConfigurationError(f'invalid config {path}: {e}')

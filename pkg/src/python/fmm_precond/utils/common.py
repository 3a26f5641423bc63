from typing import Generic, List, Optional, TypeVar
from uuid import UUID, uuid5, NAMESPACE_URL


from fmm_precond.utils.serialization import CamelModel

T = TypeVar('T')


def run_id_for(experiment_id: str, seed: int) -> UUID:
    """
    Deterministic run identifier so that reruns of the same experiment and seed share an ID.
    """
    return uuid5(NAMESPACE_URL, f'fmm-precond/{experiment_id}/{seed}')


class RunReport(CamelModel, Generic[T]):
    """
    Generic envelope written next to every experiment's CSV output. The result
    object is the payload and varies between experiments (rows, spectra summaries);
    the other fields carry provenance and any warnings raised while producing it,
    e.g. cells that did not converge or preconditioners that needed a shifted factorization.
    """

    run_id: UUID
    """
    Identifier derived from the experiment ID and seed; identical across reruns.
    """

    experiment_id: str
    """
    Catalog identifier (E1-E8) or the name given to a custom configuration.
    """

    seed: int
    """
    Seed that drove every random choice in the run.
    """

    warnings: Optional[List[str]]
    """
    Non-fatal problems encountered while running the sweep, one line each.
    """

    result: T
    """
    The payload; typically a list of ResultRow objects.
    """

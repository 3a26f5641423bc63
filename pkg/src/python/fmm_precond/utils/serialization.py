from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np
from humps.camel import case
from pydantic import BaseModel

# keyword arguments of BaseModel.json that select fields rather than shape the JSON text
_FIELD_OPTIONS = ('include', 'exclude', 'by_alias', 'exclude_unset', 'exclude_defaults', 'exclude_none')


def _encode_value(v: Any) -> Any:
    if isinstance(v, dict):
        return fmm_json_format(v)
    if isinstance(v, (list, tuple)):
        return [_encode_value(x) for x in v]
    if isinstance(v, Enum):
        return v.name
    if isinstance(v, np.ndarray):
        return _encode_value(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.generic):
        return v.item()
    return v


def fmm_json_format(data: Dict) -> Dict:
    for k, v in data.items():
        # enums go out by name; complex values as [re, im]; arrays as nested lists
        data[k] = _encode_value(v)
    return data


def fmm_json(self, *, encoder: Optional[Callable[[Any], Any]] = None, models_as_dict: bool = True,
             **kwargs: Any) -> str:
    """
    Same contract as BaseModel.json, with the field values passed through fmm_json_format
    before they reach the JSON encoder.
    """
    options = {k: kwargs.pop(k) for k in _FIELD_OPTIONS if k in kwargs}
    data = dict(self._iter(to_dict=models_as_dict, **options))
    if self.__custom_root_type__:
        data = data['__root__']
    return self.__config__.json_dumps(_encode_value(data), default=encoder or self.__json_encoder__, **kwargs)


class CamelModel(BaseModel):
    """
    Helper base class that ensures JSON is encoded camel-case, enums are encoded by name and
    numerical payloads (complex scalars, numpy arrays) are reduced to plain JSON lists.
    """

    class Config:
        alias_generator = case
        allow_population_by_field_name = True
        arbitrary_types_allowed = True

    json = fmm_json

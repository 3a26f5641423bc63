from enum import Enum
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Type
from uuid import UUID

import numpy as np
from faker import Faker
from pydantic import BaseModel
from typing_inspect import get_args, get_origin, is_optional_type, is_union_type


class BaseModelFaker:
    """
    Builds fake Pydantic objects by walking a model's fields and faking each one by type.
    Custom fakers can be registered per type, and a pre-create hook can repair generated
    data that validators would reject (e.g. a Helmholtz kernel with κ <= 0). Numbers stay in
    a moderate range so that numeric fields remain meaningful.
    """
    def __init__(self, custom_field_fakers: Optional[Dict[Type, Callable]] = None,
                 pre_create_hook: Optional[Callable[[Dict], Dict]] = None, seed: int = 0):
        self.pre_create_hook = pre_create_hook
        self.faker = Faker()
        self.faker.seed_instance(seed)
        self._fakers_by_type = {
            bool: self.faker.pybool,
            str: self.faker.pystr,
            int: partial(self.faker.random_int, min=1, max=64),
            float: partial(self.faker.pyfloat, min_value=1e-3, max_value=1e3),
            complex: self.fake_complex,
            np.ndarray: self.fake_array,
            UUID: self.faker.uuid4,
        }
        self._fakers_by_type.update(custom_field_fakers or {})

    def create_fake_model(self, model_class: Type[BaseModel]):
        init_data = {name: self._faker_for(self._concrete_type(field.outer_type_))()
                     for name, field in model_class.__fields__.items()}
        if self.pre_create_hook:
            init_data = self.pre_create_hook(init_data)
        return model_class(**init_data)

    def fake_complex(self) -> complex:
        fake_float = self._fakers_by_type[float]
        return complex(fake_float(), fake_float())

    def fake_array(self) -> np.ndarray:
        return np.array([self.fake_complex() for _ in range(self._count())])

    def _count(self) -> int:
        return self.faker.pyint(min_value=1, max_value=5)

    def _concrete_type(self, field_type: Type) -> Type:
        if is_optional_type(field_type):
            # lead type of Optional[T], never NoneType
            return get_args(field_type)[0]
        if is_union_type(field_type):
            return self._pick(get_args(field_type))
        return field_type

    def _faker_for(self, clazz: Type) -> Callable:
        if clazz in self._fakers_by_type:
            return self._fakers_by_type[clazz]
        origin, args = get_origin(clazz), get_args(clazz)
        if origin is not None and issubclass(origin, List):
            return lambda: [self._faker_for(args[0])() for _ in range(self._count())]
        if origin is not None and issubclass(origin, Tuple):
            return lambda: tuple(self._faker_for(arg)() for arg in args)
        if origin is not None and issubclass(origin, Dict):
            return lambda: {self._faker_for(args[0])(): self._faker_for(args[1])() for _ in range(self._count())}
        if issubclass(clazz, Enum):
            return lambda: self._pick(list(clazz))
        if issubclass(clazz, BaseModel):
            return partial(self.create_fake_model, clazz)
        raise ValueError(f'Unhandled inner type: {clazz}')

    def _pick(self, values: Sequence):
        return values[self.faker.pyint(min_value=0, max_value=len(values) - 1)]


faker = BaseModelFaker()


def roundtrip(clazz: Type, model_faker: BaseModelFaker = faker):
    """
    Serializes a fake instance to JSON and parses it back. Covers aliasing, enum encoding
    and validators of plain-data models; not a substitute for targeted edge-case tests.
    """
    obj = model_faker.create_fake_model(clazz)
    obj_out = clazz.parse_raw(obj.json())
    assert obj == obj_out
    return obj_out

from pydantic import BaseModel, field_validator
from typing import Optional, Tuple

from app.errors import ParameterError

# A word is a tuple of signed 1-based generator indices; -i is the inverse of generator i.
WordTuple = Tuple[int, ...]

ENGINE_TAGS = ("free", "free-abelian", "free-abelian-product", "rewriting")


class SubgroupSpec(BaseModel):
    name: str
    generators: Tuple[int, ...]

    class Config:
        frozen = True


class RewriteRule(BaseModel):
    lhs: WordTuple
    rhs: WordTuple = ()

    class Config:
        frozen = True

    @field_validator('lhs')
    def lhs_nonempty(cls, v):
        if not v:
            raise ValueError('Rewriting rule needs a nonempty left-hand side')
        return v


class Presentation(BaseModel):
    """Finite presentation plus the subgroup families and word-problem strategy.

    Instances are frozen and hashable so engines and balls can be cached per presentation.
    """
    generator_names: Tuple[str, ...]
    relators: Tuple[WordTuple, ...] = ()
    subgroups: Tuple[SubgroupSpec, ...] = ()
    engine: Optional[str] = None
    rules: Tuple[RewriteRule, ...] = ()

    class Config:
        frozen = True

    @field_validator('generator_names')
    def names_distinct(cls, v):
        if len(set(v)) != len(v):
            raise ValueError('Duplicate generator symbols')
        for name in v:
            if len(name) != 1 or not name.islower() or name == 'e':
                raise ValueError(f"Generator symbol '{name}' must be a single lowercase letter other than 'e'")
        return v

    @field_validator('relators')
    def relators_cyclically_reduced(cls, v, info):
        rank = len(info.data.get('generator_names', ()))
        for r in v:
            if not r:
                raise ValueError('Relators must be nonempty')
            if any(x == 0 or abs(x) > rank for x in r):
                raise ValueError(f'Relator {r} references an undeclared generator')
            if any(r[i] == -r[i + 1] for i in range(len(r) - 1)) or (len(r) > 1 and r[0] == -r[-1]):
                raise ValueError(f'Relator {r} is not cyclically reduced')
        return v

    @field_validator('subgroups')
    def subgroups_declared(cls, v, info):
        rank = len(info.data.get('generator_names', ()))
        names = [s.name for s in v]
        if len(set(names)) != len(names):
            raise ValueError('Duplicate subgroup names')
        for s in v:
            if any(g <= 0 or g > rank for g in s.generators):
                raise ValueError(f'Subgroup {s.name} uses an undeclared generator')
        return v

    @field_validator('engine')
    def engine_known(cls, v):
        if v is not None and v not in ENGINE_TAGS:
            raise ValueError(f"Unknown engine '{v}'; expected one of {', '.join(ENGINE_TAGS)}")
        return v

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def subgroup(self, name: str) -> SubgroupSpec:
        for s in self.subgroups:
            if s.name == name:
                return s
        raise ParameterError(f"Unknown subgroup {name!r}")

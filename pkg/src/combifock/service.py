"""HTTP service exposing the package's computations.

Every endpoint is a pure function of its request model; the CLI drives the
same app in-process, so the service is also the canonical definition of the
machine-readable output schemas.
"""

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .dsl import SpeciesSyntaxError, species_from_string
from .fock import FockSpace
from .operators import annihilator, basis_color_vector, creator, number_operator
from .pairpartitions import (
    blocks,
    hankel_min_eigenvalue,
    moments,
    pair_partitions,
    pairing_table,
    t_ballot_closed_form,
)
from .verify import run_check
from .weights import WeightSyntaxError, weight_from_name

app = FastAPI(title="combifock", version=__version__)


class SpeciesCountRequest(BaseModel):
    expr: str
    max_level: int = Field(5, ge=0, le=8)


class SpeciesCountResponse(BaseModel):
    expr: str
    counts: list[int]


class SpeciesListRequest(BaseModel):
    expr: str
    level: int = Field(..., ge=0, le=8)


class SpeciesListResponse(BaseModel):
    expr: str
    level: int
    structures: list[str]


class BasisRequest(BaseModel):
    expr: str
    colors: int = Field(2, ge=1)
    max_level: int = Field(3, ge=0, le=6)


class BasisRecord(BaseModel):
    level: int
    index: int
    representative_encoding: str
    coloring: list[int]
    orbit_size: int
    norm_sq: int


class BasisResponse(BaseModel):
    expr: str
    colors: int
    max_level: int
    dim: int
    orbits: list[BasisRecord]


class MatrixRequest(BaseModel):
    weight: str
    kind: str = Field("create", pattern="^(create|annihilate|number)$")
    color: int = Field(0, ge=0)
    colors: int = Field(2, ge=1)
    max_level: int = Field(3, ge=0, le=6)


class MatrixResponse(BaseModel):
    weight: str
    kind: str
    shape: list[int]
    level_offsets: list[int]
    coo: list[list[float]]


class CheckRequest(BaseModel):
    name: str
    q: Optional[float] = None
    c: Optional[float] = None
    poly: Optional[list[float]] = None
    levels: Optional[int] = None
    colors: Optional[int] = None
    tol: Optional[float] = None


class CheckResponse(BaseModel):
    name: str
    parameters: dict
    num_colors: int
    max_level: int
    safe_levels: list[int]
    max_deviation: float
    tolerance: float
    passed: bool
    detail: dict


class MomentsRequest(BaseModel):
    weight: str
    order: int = Field(6, ge=0, le=10)
    colors: int = Field(2, ge=1)
    color: int = Field(0, ge=0)


class MomentsResponse(BaseModel):
    weight: str
    orders: list[int]
    values: list[float]
    hankel_min_eigenvalue: Optional[float] = None


class PairTRequest(BaseModel):
    weight: str
    r: int = Field(3, ge=1, le=4)


class PairTRow(BaseModel):
    pairs: list[list[int]]
    num_blocks: int
    re: float
    im: float


class PairTResponse(BaseModel):
    weight: str
    rows: list[PairTRow]


class PairEnumRequest(BaseModel):
    r: int = Field(..., ge=0, le=6)


class PairEnumResponse(BaseModel):
    r: int
    count: int
    partitions: list[list[list[int]]]
    num_blocks: list[int]


def _species(expr):
    try:
        return species_from_string(expr)
    except (SpeciesSyntaxError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def _weight(name):
    try:
        return weight_from_name(name)
    except (WeightSyntaxError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/species/count", response_model=SpeciesCountResponse)
def species_count(req: SpeciesCountRequest):
    species = _species(req.expr)
    return SpeciesCountResponse(
        expr=req.expr, counts=[species.count(n) for n in range(req.max_level + 1)]
    )


@app.post("/species/list", response_model=SpeciesListResponse)
def species_list(req: SpeciesListRequest):
    species = _species(req.expr)
    return SpeciesListResponse(
        expr=req.expr,
        level=req.level,
        structures=[repr(s) for s in species.structures(req.level)],
    )


@app.post("/fock/basis", response_model=BasisResponse)
def fock_basis(req: BasisRequest):
    species = _species(req.expr)
    space = FockSpace(species, req.colors, req.max_level)
    return BasisResponse(
        expr=req.expr,
        colors=req.colors,
        max_level=req.max_level,
        dim=space.dim,
        orbits=[BasisRecord(**rec) for rec in space.records()],
    )


@app.post("/op/matrix", response_model=MatrixResponse)
def op_matrix(req: MatrixRequest):
    w = _weight(req.weight)
    space = FockSpace(w.species, req.colors, req.max_level)
    if req.color >= req.colors:
        raise HTTPException(status_code=422, detail="color index out of range")
    if req.kind == "number":
        op = number_operator(space)
    else:
        h = basis_color_vector(space, req.color)
        op = creator(space, w, h) if req.kind == "create" else annihilator(space, w, h)
    coo = []
    mat = op.mat
    rows, cols = mat.nonzero()
    for r, c in zip(rows.tolist(), cols.tolist()):
        v = mat[r, c]
        coo.append([float(r), float(c), float(v.real), float(v.imag)])
    return MatrixResponse(
        weight=req.weight,
        kind=req.kind,
        shape=[space.dim, space.dim],
        level_offsets=list(space.offsets),
        coo=coo,
    )


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest):
    try:
        report = run_check(
            req.name, q=req.q, c=req.c, poly=req.poly, levels=req.levels, colors=req.colors, tol=req.tol
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return CheckResponse(**report.to_dict())


@app.post("/moments", response_model=MomentsResponse)
def moments_endpoint(req: MomentsRequest):
    w = _weight(req.weight)
    if req.color >= req.colors:
        raise HTTPException(status_code=422, detail="color index out of range")
    try:
        vals = moments(w, req.order, num_colors=req.colors, color=req.color)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    hmin = hankel_min_eigenvalue(vals) if req.order >= 6 else None
    return MomentsResponse(
        weight=req.weight,
        orders=list(range(req.order + 1)),
        values=[float(v) for v in vals],
        hankel_min_eigenvalue=hmin,
    )


@app.post("/pairpart/t", response_model=PairTResponse)
def pairpart_t(req: PairTRequest):
    w = _weight(req.weight)
    try:
        rows = pairing_table(w, req.r)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return PairTResponse(
        weight=req.weight,
        rows=[
            PairTRow(
                pairs=[list(p) for p in part],
                num_blocks=len(blocks(part)),
                re=float(val.real),
                im=float(val.imag),
            )
            for part, val in rows
        ],
    )


@app.post("/pairpart/enum", response_model=PairEnumResponse)
def pairpart_enum(req: PairEnumRequest):
    parts = pair_partitions(req.r)
    return PairEnumResponse(
        r=req.r,
        count=len(parts),
        partitions=[[list(p) for p in part] for part in parts],
        num_blocks=[len(blocks(part)) for part in parts],
    )

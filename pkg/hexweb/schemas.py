"""JSON formats: hexmap.v1, move.v1, pants.v1, fn.v1, geostate.v1 and wstate.v1.

Reals are written as decimal strings with 17 significant digits so that a state read
back is bit-for-bit the state written.
"""
import json
import logging
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from .errors import InvalidConfig, ValidationError
from .hyp_geom import FNConfig, GeoState, GeomData, validate_config
from .moves_topo import MOVE_KINDS, MoveEdge, Reattachment
from .pants_bridge import PantsDecomp, base_pants, validate_pants
from .surface_core import NO_SLOT, CompatibleCurve, HexMap, SurfaceSig, canonical_relabel, validate
from .weighted_graph import WeightedState, orientations

logger = logging.getLogger(__name__)

Real = Union[str, float, int]


def encode_real(value: float) -> str:
    return format(value, ".17g")


def decode_real(value: Real) -> float:
    return float(value)


class SignatureModel(BaseModel):
    genus: int = Field(ge=0)
    boundary: int = Field(ge=0)

    def to_sig(self) -> SurfaceSig:
        return SurfaceSig(self.genus, self.boundary)

    @classmethod
    def of(cls, sig: SurfaceSig) -> "SignatureModel":
        return cls(genus=sig.genus, boundary=sig.boundary_count)


class LabelsModel(BaseModel):
    arcs: List[int]
    circles: List[int]


class HexMapModel(BaseModel):
    schema_name: str = Field(default="hexmap.v1", alias="schema")
    signature: SignatureModel
    hexagons: List[List[int]]
    arc_gluing: List[List[int]]
    curve_pairs: List[List[int]]
    peripheral: List[int]
    labels: LabelsModel

    model_config = {"populate_by_name": True}


class ReattachmentModel(BaseModel):
    word: str
    shift: int


class MoveModel(BaseModel):
    schema_name: str = Field(default="move.v1", alias="schema")
    kind: str
    arc: Optional[int] = None
    curve: Optional[List[List[int]]] = None
    curve_label: Optional[int] = None
    reattachment: Optional[ReattachmentModel] = None
    delta: int = 0
    weight: Optional[int] = None

    model_config = {"populate_by_name": True}


class PantsModel(BaseModel):
    schema_name: str = Field(default="pants.v1", alias="schema")
    signature: SignatureModel
    pants: List[List[int]]
    peripheral: List[int]

    model_config = {"populate_by_name": True}


class FNModel(BaseModel):
    schema_name: str = Field(default="fn.v1", alias="schema")
    signature: SignatureModel
    pants: Optional[List[List[int]]] = None
    peripheral: Optional[List[int]] = None
    lengths: Dict[str, Real]
    twists: Dict[str, Real] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}


class GeoStateModel(BaseModel):
    schema_name: str = Field(default="geostate.v1", alias="schema")
    hexmap: HexMapModel
    sides: List[str]
    starts: List[str]
    curve_lengths: Dict[str, str]
    tolerance: str

    model_config = {"populate_by_name": True}


class WeightedStateModel(GeoStateModel):
    schema_name: str = Field(default="wstate.v1", alias="schema")
    orientations: List[int]
    weights: Dict[str, int]


# Hexagon maps

def hexmap_to_model(hex_map: HexMap, canonical: bool = True) -> HexMapModel:
    """Export a map; canonical numbering makes isomorphic maps serialize identically"""
    if canonical:
        hex_map = canonical_relabel(hex_map)
    pairs = sorted({(min(s, hex_map.glue[s]), max(s, hex_map.glue[s])) for s in hex_map.arc_slots()})
    return HexMapModel(
        signature=SignatureModel.of(hex_map.signature),
        hexagons=[list(range(6 * h, 6 * h + 6)) for h in range(hex_map.hexagon_count)],
        arc_gluing=[list(p) for p in pairs],
        curve_pairs=[[2 * c, 2 * c + 1] for c in hex_map.interior_curves()],
        peripheral=sorted(2 * c for c in hex_map.peripheral),
        labels=LabelsModel(arcs=[hex_map.arc_label[a] for a, _ in pairs], circles=list(hex_map.circle)),
    )


def hexmap_from_model(model: HexMapModel) -> HexMap:
    sig = model.signature.to_sig()
    n = 6 * len(model.hexagons)
    if len(model.labels.circles) != n or len(model.labels.arcs) != len(model.arc_gluing):
        raise ValidationError("Label arrays do not match the slot count")
    glue = [NO_SLOT] * n
    arc_label = [NO_SLOT] * n
    for (s, t), label in zip(model.arc_gluing, model.labels.arcs):
        glue[s], glue[t] = t, s
        arc_label[s] = arc_label[t] = label
    hex_map = HexMap(sig, tuple(glue), tuple(arc_label), tuple(model.labels.circles), frozenset(c // 2 for c in model.peripheral))
    validate(hex_map)
    return hex_map


# Moves

def move_to_model(edge: MoveEdge) -> MoveModel:
    return MoveModel(
        kind=edge.kind,
        arc=edge.arc,
        curve=[list(seg) for seg in edge.curve.segments] if edge.curve else None,
        curve_label=edge.curve_label,
        reattachment=ReattachmentModel(word=edge.reattachment.word, shift=edge.reattachment.shift)
        if edge.reattachment
        else None,
        delta=edge.delta,
        weight=edge.weight,
    )


def move_from_model(model: MoveModel) -> MoveEdge:
    if model.kind not in MOVE_KINDS:
        raise ValidationError(f"Unknown move kind {model.kind}")
    return MoveEdge(
        kind=model.kind,
        arc=model.arc,
        curve=CompatibleCurve(tuple(tuple(seg) for seg in model.curve)) if model.curve else None,
        curve_label=model.curve_label,
        reattachment=Reattachment(model.reattachment.word, model.reattachment.shift) if model.reattachment else None,
        delta=model.delta,
        weight=model.weight,
    )


def move_line(edge: MoveEdge) -> str:
    """One line of a replayable move log"""
    return json.dumps(move_to_model(edge).model_dump(by_alias=True), separators=(",", ":"), sort_keys=True)


def read_move_log(lines: List[str]) -> List[MoveEdge]:
    return [move_from_model(MoveModel.model_validate_json(line)) for line in lines if line.strip()]


# Pants and FN coordinates

def pants_to_model(decomp: PantsDecomp) -> PantsModel:
    return PantsModel(
        signature=SignatureModel.of(decomp.signature),
        pants=[list(p) for p in decomp.pants],
        peripheral=sorted(decomp.peripheral),
    )


def pants_from_model(model: PantsModel) -> PantsDecomp:
    decomp = PantsDecomp.of(model.signature.to_sig(), model.pants, model.peripheral)
    validate_pants(decomp)
    return decomp


def fn_to_model(config: FNConfig) -> FNModel:
    return FNModel(
        signature=SignatureModel.of(config.signature),
        pants=[list(p) for p in config.decomposition.pants],
        peripheral=sorted(config.decomposition.peripheral),
        lengths={str(c): encode_real(v) for c, v in config.lengths},
        twists={str(c): encode_real(v) for c, v in config.twists},
    )


def fn_from_model(model: FNModel) -> FNConfig:
    """Read FN coordinates; without explicit pants the base pants decomposition is used"""
    sig = model.signature.to_sig()
    if model.pants is None:
        decomp = base_pants(sig)
    else:
        decomp = PantsDecomp.of(sig, model.pants, model.peripheral or [])
    try:
        lengths = {int(c): decode_real(v) for c, v in model.lengths.items()}
        twists = {int(c): decode_real(v) for c, v in model.twists.items()}
    except ValueError as e:
        raise InvalidConfig(f"Unreadable FN coordinates: {e}")
    config = FNConfig.of(decomp, lengths, twists)
    unknown = set(twists) - set(decomp.interior_curves())
    if unknown:
        raise InvalidConfig(f"Twists given for non-interior curves {sorted(unknown)}")
    validate_config(config)
    return config


# Geometric and weighted states

def geostate_to_model(state: GeoState) -> GeoStateModel:
    return GeoStateModel(
        hexmap=hexmap_to_model(state.hex_map, canonical=False),
        sides=[encode_real(v) for v in state.geom.sides],
        starts=[encode_real(v) for v in state.geom.starts],
        curve_lengths={str(c): encode_real(v) for c, v in state.geom.curve_lengths},
        tolerance=encode_real(state.geom.tolerance),
    )


def geostate_from_model(model: GeoStateModel) -> GeoState:
    hex_map = hexmap_from_model(model.hexmap)
    if len(model.sides) != hex_map.slot_count or len(model.starts) != hex_map.slot_count:
        raise ValidationError("Geometry arrays do not match the slot count")
    geom = GeomData(
        tuple(decode_real(v) for v in model.sides),
        tuple(decode_real(v) for v in model.starts),
        tuple(sorted((int(c), decode_real(v)) for c, v in model.curve_lengths.items())),
        decode_real(model.tolerance),
    )
    return GeoState(hex_map, geom)


def wstate_to_model(state: WeightedState) -> WeightedStateModel:
    base = geostate_to_model(state.geo)
    return WeightedStateModel(
        **base.model_dump(exclude={"schema_name"}),
        orientations=orientations(state),
        weights={str(c): w for c, w in state.weights},
    )


def wstate_from_model(model: WeightedStateModel) -> WeightedState:
    geo = geostate_from_model(model)
    weights = tuple(sorted((int(c), w) for c, w in model.weights.items()))
    if [c for c, _ in weights] != geo.hex_map.interior_curves():
        raise ValidationError("Weights must be given for exactly the interior curves")
    return WeightedState(geo, weights)


# Files

def dump_model(model: BaseModel) -> str:
    return json.dumps(model.model_dump(by_alias=True), indent=2, sort_keys=True)


def load_state(text: str) -> Union[HexMap, GeoState, WeightedState]:
    """Read any state file by its ``schema`` tag"""
    data = json.loads(text)
    schema = data.get("schema")
    if schema == "hexmap.v1":
        return hexmap_from_model(HexMapModel.model_validate(data))
    if schema == "geostate.v1":
        return geostate_from_model(GeoStateModel.model_validate(data))
    if schema == "wstate.v1":
        return wstate_from_model(WeightedStateModel.model_validate(data))
    raise ValidationError(f"Unknown state schema {schema}")

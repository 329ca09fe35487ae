from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, StrictStr


class ArtifactModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NodeSchema(ArtifactModel):
    id: StrictInt
    object: StrictStr
    attributes: List[StrictStr]


class EdgeSchema(ArtifactModel):
    src: StrictInt
    dst: StrictInt
    relation: StrictStr


class GraphSchema(ArtifactModel):
    caption: StrictStr
    nodes: List[NodeSchema]
    edges: List[EdgeSchema]


class SentenceSchema(ArtifactModel):
    kind: Literal["OBJECT", "RELATION", "ATTRIBUTE"]
    text: StrictStr


class SplitSchema(ArtifactModel):
    sentences: List[SentenceSchema]


class ScheduleSchema(ArtifactModel):
    s_obj: Literal[0]
    s_rel: StrictInt
    s_attr: StrictInt
    windows: Dict[Literal["obj", "rel", "attr"], List[StrictInt]]
    config: Dict = Field(default_factory=dict)
    notes: List[StrictStr] = Field(default_factory=list)


Number = Union[StrictFloat, StrictInt]


class TraceLineSchema(ArtifactModel):
    step: StrictInt
    sigma: Number
    snr: Number
    attn: List[List[List[Number]]]
    shape: List[StrictInt] = Field(min_length=2, max_length=2)
    inject_attn: Optional[List[List[List[Number]]]] = None
    inject_shape: Optional[List[StrictInt]] = None


class TensorHeaderSchema(ArtifactModel):
    shape: List[StrictInt] = Field(min_length=2, max_length=2)
    dtype: Literal["f32"]


class CheckpointHeaderSchema(ArtifactModel):
    format: Literal["split-dit-checkpoint"]
    dtype: Literal["f32"]
    config_hash: StrictStr
    tensors: List[List]

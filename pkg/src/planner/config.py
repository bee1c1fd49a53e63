"""
Model hyper-parameters shared by VLM-lite and E2E-lite.
"""
from typing import List, Literal

from pydantic import Field, model_validator

from src.core.config import ConfigModel
from src.domain.vocabulary import VIEW_ORDER, View
from src.vision_adapter.params import AdapterConfig

ViewMode = Literal["surround", "front"]


class ModelConfig(ConfigModel):
    width: int = Field(default=64, ge=4)
    heads: int = Field(default=4, ge=1)
    m_img: int = Field(default=8, ge=1)
    trunk_layers: int = Field(default=2, ge=1)
    decoder_layers: int = Field(default=2, ge=1)
    ff_hidden: int = Field(default=128, ge=1)
    plan_tokens: int = Field(default=4, ge=1)
    vlm_ego_status: bool = False
    e2e_ego_status: bool = True
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check(self):
        # Raises through AdapterConfig when width/heads/m_img disagree
        self.adapter_config()
        return self

    def adapter_config(self) -> AdapterConfig:
        return AdapterConfig(width=self.width, heads=self.heads, m_img=self.m_img)


def view_ids(mode: ViewMode) -> List[int]:
    """Indices into VIEW_ORDER of the views a mode feeds to the model."""
    return [0] if mode == "front" else list(range(len(VIEW_ORDER)))


def views_for(mode: ViewMode) -> List[View]:
    return [VIEW_ORDER[i] for i in view_ids(mode)]

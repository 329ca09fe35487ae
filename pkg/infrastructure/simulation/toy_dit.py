"""
Toy diffusion transformer.

Each block runs self-attention over the latent tokens, cross-attention to
the conditioning sequence T, an optional injection cross-attention to the
currently active primitive tokens, and a feed-forward layer. Attention
weights are returned per head so the denoiser can record them.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

MASKED_LOGIT = -1e9


@dataclass(frozen=True)
class ToyDiTConfig:
    width: int = 32
    layers: int = 2
    heads: int = 2
    latent_tokens: int = 16
    ff_mult: int = 2
    # None injects into every block
    inject_blocks: Optional[Tuple[bool, ...]] = None
    # power of the sigma gate on the timestep embedding
    time_decay: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if self.width % self.heads != 0:
            raise ValueError("width must be divisible by heads")
        if self.inject_blocks is not None and len(self.inject_blocks) != self.layers:
            raise ValueError("inject_blocks needs one flag per layer")

    def injects_into(self, block: int) -> bool:
        return self.inject_blocks is None or bool(self.inject_blocks[block])


@dataclass
class AttentionMaps:
    """Per-block attention weights, each (batch, heads, queries, keys)"""

    cond: List[torch.Tensor] = field(default_factory=list)
    inject: List[torch.Tensor] = field(default_factory=list)

    def cond_stack(self) -> torch.Tensor:
        return torch.stack(self.cond, dim=1)

    def inject_stack(self) -> Optional[torch.Tensor]:
        if not self.inject:
            return None
        return torch.stack(self.inject, dim=1)


class TimestepEmbeddings(nn.Module):
    """Sinusoidal embedding of the noise level, gated by sigma**decay.

    The gate fades time conditioning out as sigma approaches 0, so over a
    settled latent the conditioning attention stops moving late in a run.
    """

    def __init__(self, width: int, max_period: float = 100.0, decay: float = 8.0):
        super().__init__()
        self.width = width
        self.max_period = max_period
        self.decay = decay
        self.mlp = nn.Sequential(
            nn.Linear(width, width), nn.SiLU(), nn.Linear(width, width)
        )

    def forward(self, sigma: torch.Tensor) -> torch.Tensor:
        half = self.width // 2
        exponent = (
            -math.log(self.max_period)
            * torch.arange(half, dtype=sigma.dtype, device=sigma.device)
            / half
        )
        angles = sigma.unsqueeze(1) * torch.exp(exponent).unsqueeze(0)
        embedding = self.mlp(torch.cat([torch.sin(angles), torch.cos(angles)], dim=-1))
        return embedding * sigma.pow(self.decay).unsqueeze(1)


class MultiHeadAttention(nn.Module):
    """Scaled dot-product attention that also returns the softmax weights"""

    def __init__(self, width: int, heads: int):
        super().__init__()
        self.heads = heads
        self.head_dim = width // heads
        self.to_q = nn.Linear(width, width)
        self.to_k = nn.Linear(width, width)
        self.to_v = nn.Linear(width, width)
        self.to_out = nn.Linear(width, width)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        batch, tokens, _ = x.shape
        return x.view(batch, tokens, self.heads, self.head_dim).transpose(1, 2)

    def forward(
        self,
        queries: torch.Tensor,
        context: torch.Tensor,
        key_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        q = self._split(self.to_q(queries))
        k = self._split(self.to_k(context))
        v = self._split(self.to_v(context))

        logits = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        if key_mask is not None:
            logits = logits.masked_fill(~key_mask[:, None, None, :], MASKED_LOGIT)
        weights = F.softmax(logits, dim=-1)

        out = (weights @ v).transpose(1, 2).reshape(queries.shape)
        return self.to_out(out), weights


class ToyDiTBlock(nn.Module):

    def __init__(self, width: int, heads: int, ff_mult: int, inject: bool):
        super().__init__()
        self.norm_self = nn.LayerNorm(width)
        self.self_attn = MultiHeadAttention(width, heads)
        self.norm_cond = nn.LayerNorm(width)
        self.cond_attn = MultiHeadAttention(width, heads)
        self.norm_inject = nn.LayerNorm(width) if inject else None
        self.inject_attn = MultiHeadAttention(width, heads) if inject else None
        self.norm_ff = nn.LayerNorm(width)
        self.ff = nn.Sequential(
            nn.Linear(width, ff_mult * width),
            nn.GELU(),
            nn.Linear(ff_mult * width, width),
        )

    def forward(
        self,
        hidden: torch.Tensor,
        cond: torch.Tensor,
        cond_mask: Optional[torch.Tensor],
        prim: Optional[torch.Tensor],
        prim_mask: Optional[torch.Tensor],
    ) -> Tuple[torch.Tensor, torch.Tensor, Optional[torch.Tensor]]:
        normed = self.norm_self(hidden)
        update, _ = self.self_attn(normed, normed)
        hidden = hidden + update

        update, cond_weights = self.cond_attn(self.norm_cond(hidden), cond, cond_mask)
        hidden = hidden + update

        inject_weights = None
        if self.inject_attn is not None and prim is not None and prim.shape[1] > 0:
            update, inject_weights = self.inject_attn(
                self.norm_inject(hidden), prim, prim_mask
            )
            if prim_mask is not None:
                # items without any active primitive get no injection update
                update = update * prim_mask.any(dim=1)[:, None, None].to(update.dtype)
            hidden = hidden + update

        hidden = hidden + self.ff(self.norm_ff(hidden))
        return hidden, cond_weights, inject_weights


class ToyDiT(nn.Module):
    """Velocity model over a P x D latent grid; the output head starts at zero"""

    def __init__(self, config: ToyDiTConfig):
        super().__init__()
        self.config = config
        width = config.width
        self.pos_embed = nn.Parameter(torch.randn(config.latent_tokens, width))
        self.time_embed = TimestepEmbeddings(width, decay=config.time_decay)
        self.blocks = nn.ModuleList(
            ToyDiTBlock(width, config.heads, config.ff_mult, config.injects_into(i))
            for i in range(config.layers)
        )
        self.norm_out = nn.LayerNorm(width)
        self.head = nn.Linear(width, width)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    @classmethod
    def build(cls, config: ToyDiTConfig) -> "ToyDiT":
        """Seeded float64 construction that leaves the global torch RNG untouched"""
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed)
            model = cls(config)
        return model.to(torch.float64)

    def forward(
        self,
        latent: torch.Tensor,
        sigma: torch.Tensor,
        cond: torch.Tensor,
        prim: Optional[torch.Tensor] = None,
        cond_mask: Optional[torch.Tensor] = None,
        prim_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, AttentionMaps]:
        hidden = latent + self.pos_embed.unsqueeze(0)
        hidden = hidden + self.time_embed(sigma).unsqueeze(1)

        maps = AttentionMaps()
        for block in self.blocks:
            hidden, cond_weights, inject_weights = block(
                hidden, cond, cond_mask, prim, prim_mask
            )
            maps.cond.append(cond_weights)
            if inject_weights is not None:
                maps.inject.append(inject_weights)

        return self.head(self.norm_out(hidden)), maps

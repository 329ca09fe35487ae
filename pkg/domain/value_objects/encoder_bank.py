from dataclasses import dataclass

import numpy as np

from domain.services.text_encoder import TextEncoder


@dataclass(frozen=True, eq=False)
class EncoderBank:
    """The three text encoders plus the complete-text projection.

    `proj` maps the T5 width D to D' = D - D_L - D_G (shape D x D').
    """

    enc_l: TextEncoder
    enc_g: TextEncoder
    enc_t5: TextEncoder
    proj: np.ndarray

    def __post_init__(self):
        proj = np.asarray(self.proj, dtype=np.float64)
        proj.setflags(write=False)
        object.__setattr__(self, "proj", proj)

    @property
    def width(self) -> int:
        return self.enc_t5.dim

    @property
    def d_prime(self) -> int:
        return self.width - self.enc_l.dim - self.enc_g.dim

    def with_proj(self, proj: np.ndarray) -> "EncoderBank":
        return EncoderBank(self.enc_l, self.enc_g, self.enc_t5, proj)

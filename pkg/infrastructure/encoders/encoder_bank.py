import logging

import numpy as np

from domain.exceptions.encoding_exceptions import DimMismatchError
from domain.value_objects.encoder_bank import EncoderBank
from domain.value_objects.token_sequence import EncoderSpec
from infrastructure.encoders.toy_encoder import ToyEncoder
from shared.utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)


def init_projection(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal columns, so entries are of order 1/sqrt(fan_in)"""
    gaussian = rng.standard_normal((fan_in, fan_out))
    q, r = np.linalg.qr(gaussian)
    # sign fix makes the factorization unique
    return q * np.sign(np.diag(r))


def build_encoder_bank(
    d_l: int = 8,
    d_g: int = 16,
    d: int = 32,
    max_len: int = 77,
    seed: int = 0,
) -> EncoderBank:
    d_prime = d - d_l - d_g
    if d_prime < 1:
        raise DimMismatchError(
            f"D' = D - D_L - D_G must be positive (D={d}, D_L={d_l}, D_G={d_g})",
            {"D": d, "D_L": d_l, "D_G": d_g},
        )
    bank = EncoderBank(
        enc_l=ToyEncoder(EncoderSpec("clip-l", d_l, max_len, derive_seed(seed, "clip-l"))),
        enc_g=ToyEncoder(EncoderSpec("clip-g", d_g, max_len, derive_seed(seed, "clip-g"))),
        enc_t5=ToyEncoder(EncoderSpec("t5", d, max_len, derive_seed(seed, "t5"))),
        proj=init_projection(d, d_prime, derive_rng(seed, "proj")),
    )
    logger.debug(
        "Built toy encoder bank", extra={"d_l": d_l, "d_g": d_g, "d": d, "d_prime": d_prime}
    )
    return bank

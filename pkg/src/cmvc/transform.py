"""8x8 block DCT shared by the image codec and the latent backend."""

from __future__ import annotations

import numpy as np

BLOCK = 8


def _dct_matrix(size: int = BLOCK) -> np.ndarray:
    m = np.empty((size, size), dtype=np.float64)
    m[0, :] = 1.0 / np.sqrt(size)
    for i in range(1, size):
        for j in range(size):
            m[i, j] = np.sqrt(2.0 / size) * np.cos((2 * j + 1) * i * np.pi / (2 * size))
    return m


_M = _dct_matrix()


def pad_to_block(plane: np.ndarray) -> np.ndarray:
    """Grow a plane to multiples of the block size by edge replication."""
    h, w = plane.shape
    ph = (-h) % BLOCK
    pw = (-w) % BLOCK
    if ph == 0 and pw == 0:
        return np.asarray(plane, dtype=np.float64)
    return np.pad(np.asarray(plane, dtype=np.float64), ((0, ph), (0, pw)), mode="edge")


def _to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).transpose(0, 2, 1, 3)


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    hb, wb = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(hb * BLOCK, wb * BLOCK)


def block_dct(plane: np.ndarray) -> np.ndarray:
    """Orthonormal type-II DCT applied blockwise; shape is preserved.

    The plane must already be padded to block multiples.
    """
    blocks = _to_blocks(np.asarray(plane, dtype=np.float64))
    coeff = np.einsum("ij,abjk,lk->abil", _M, blocks, _M)
    return _from_blocks(coeff)


def block_idct(coeff: np.ndarray) -> np.ndarray:
    """Inverse of :func:`block_dct`."""
    blocks = _to_blocks(np.asarray(coeff, dtype=np.float64))
    plane = np.einsum("ji,abjk,kl->abil", _M, blocks, _M)
    return _from_blocks(plane)

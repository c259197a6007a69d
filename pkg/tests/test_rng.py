import numpy as np
import pytest

from fockgen.rng import SplitMix64, random_hermitian, random_vector


def reference_splitmix(seed, count):
    mask = (1 << 64) - 1
    s, out = seed, []
    for _ in range(count):
        s = (s + 0x9E3779B97F4A7C15) & mask
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def test_known_first_output():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("seed", [0, 1, 7, 2**63 + 5, 2**64 - 1])
def test_block_matches_scalar_stream(seed):
    a, b = SplitMix64(seed), SplitMix64(seed)
    block = a.block_u64(1000)
    assert [int(v) for v in block] == reference_splitmix(seed, 1000)
    assert [b.next_u64() for _ in range(1000)] == reference_splitmix(seed, 1000)
    assert a.state == b.state


def test_uniform_range_and_reproducible():
    u = SplitMix64(3).uniform(20000)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.01
    assert np.array_equal(u, SplitMix64(3).uniform(20000))
    assert SplitMix64(3).uniform() == u[0]


def test_normal_moments():
    z = SplitMix64(11).normal(50000)
    assert abs(z.mean()) < 0.02 and abs(z.var() - 1) < 0.03


def test_random_hermitian_and_vector():
    H = random_hermitian(SplitMix64(5), 7)
    assert np.array_equal(H, H.conj().T)
    assert np.array_equal(random_vector(SplitMix64(5), 9), random_vector(SplitMix64(5), 9))
    assert not np.array_equal(random_vector(SplitMix64(5), 9), random_vector(SplitMix64(6), 9))

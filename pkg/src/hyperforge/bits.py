"""Small helpers for subsets of a carrier stored as int bitmasks."""


def mask_of(elements):
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def members(mask):
    """Indices set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask):
    return bin(mask).count("1")


def full_mask(n):
    return (1 << n) - 1

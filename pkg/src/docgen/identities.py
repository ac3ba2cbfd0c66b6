"""Seeded generation of names and checksummed 18-character ID numbers."""

import hashlib
import random
from datetime import date

from src.core.identity import IdentityPair, PairSet, check_character
from src.core.lexicon import GIVEN_NAME_CHARS, SURNAMES

# Six-digit administrative region prefixes (district level).
REGION_CODES = (
    "110105", "110108", "120101", "130102", "140105", "210102", "220102",
    "310101", "310115", "320102", "330106", "340102", "350102", "360102",
    "370102", "410105", "420102", "430102", "440103", "440305", "450102",
    "500103", "510104", "520102", "530102", "610102", "620102", "640104",
    "650102",
)

BIRTH_FIRST = date(1950, 1, 1).toordinal()
BIRTH_LAST = date(2005, 12, 31).toordinal()
TWO_CHAR_GIVEN_RATE = 0.6


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from any parts; independent of PYTHONHASHSEED."""
    digest = hashlib.sha256(":".join(str(part) for part in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def random_name(rng: random.Random) -> str:
    given_length = 2 if rng.random() < TWO_CHAR_GIVEN_RATE else 1
    return rng.choice(SURNAMES) + "".join(rng.choice(GIVEN_NAME_CHARS) for _ in range(given_length))


def random_id(rng: random.Random) -> str:
    region = rng.choice(REGION_CODES)
    birth = date.fromordinal(rng.randint(BIRTH_FIRST, BIRTH_LAST))
    body = f"{region}{birth:%Y%m%d}{rng.randrange(1000):03d}"
    return body + check_character(body)


def generate_identities(seed: int, n: int) -> PairSet:
    """n identity pairs with distinct, valid ID numbers; deterministic in seed.

    Raises:
        ValueError: n < 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(derive_seed(seed, "identities"))
    seen: set[str] = set()
    pairs = []
    while len(pairs) < n:
        id_number = random_id(rng)
        if id_number in seen:
            continue
        seen.add(id_number)
        pairs.append(IdentityPair(name=random_name(rng), id_number=id_number))
    return PairSet.truth(pairs)

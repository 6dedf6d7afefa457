"""The labeled engine finds exactly the bindings of the eager oracle on
random small discourses."""
import logging
import random

import pytest

from dynres.oracle import compare_with_labeled
from dynres.parser import pretty_print
from dynres.resolve import Limits
from gen import random_sequent


@pytest.mark.parametrize("chunk", range(2))
def test_random_sequents_agree(chunk, caplog):
    caplog.set_level(logging.ERROR)
    rng = random.Random(7000 + chunk)
    decided = 0
    for _ in range(40):
        s = random_sequent(rng)
        cmp = compare_with_labeled(s, limits=Limits(max_depth=6, max_steps=4000))
        if cmp.undecided:
            continue
        decided += 1
        assert cmp.agree, pretty_print(s)
    assert decided >= 30

"""Shared hypothesis strategies: small exact spaces and integer variables."""

from fractions import Fraction

from hypothesis import strategies as st

from eicalg.measure import FiniteProbSpace, RandVar


@st.composite
def spaces(draw, max_outcomes=5):
    n = draw(st.integers(min_value=2, max_value=max_outcomes))
    raw = draw(
        st.lists(
            st.integers(min_value=1, max_value=9), min_size=n, max_size=n
        )
    )
    total = sum(raw)
    return FiniteProbSpace(
        tuple(f"z{i}" for i in range(n)),
        tuple(Fraction(r, total) for r in raw),
    )


@st.composite
def space_and_vars(draw, count=1, low=-5, high=5):
    space = draw(spaces())
    variables = []
    for _ in range(count):
        values = draw(
            st.lists(
                st.integers(min_value=low, max_value=high),
                min_size=space.size,
                max_size=space.size,
            )
        )
        variables.append(RandVar(space, tuple(Fraction(v) for v in values)))
    return (space, *variables)


small_rationals = st.builds(
    Fraction,
    st.integers(min_value=-12, max_value=12),
    st.integers(min_value=1, max_value=7),
)

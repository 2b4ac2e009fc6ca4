"""Hypothesis strategies for DSL expressions, shared by the engine tests."""

from hypothesis import strategies as st

ATOMS = ["F", "F~", "O", "O~", "e^1", "e^k", "W_k", "W_1", "w_k", "d3x", "S", "S~", "I", "eps^n", "dS_k", "dS~_k"]
DIFFERENTIABLE = ["F", "F~", "O", "W_k", "w_k", "S", "S~"]

factor = st.one_of(
    st.sampled_from(ATOMS),
    st.tuples(st.sampled_from(["d_k", "d_1", "d_n"]), st.sampled_from(DIFFERENTIABLE)).map(" ".join),
)
term = st.lists(factor, min_size=1, max_size=6).map(lambda fs: "<" + " ".join(fs) + ">0")
weight = st.sampled_from(["", "2 ", "0.5*", "3 "])
expressions = st.lists(st.tuples(st.sampled_from(["+", "-"]), weight, term), min_size=1, max_size=3).map(
    lambda ts: " ".join(f"{s} {w}{t}" for s, w, t in ts).lstrip("+ ")
)

"""Smoke test for the `neurosym` extension module.

Build and install it first:

    maturin develop -m crates/py/Cargo.toml
    python python/smoke_test.py
"""

import neurosym

WORKSHEET = [
    "all x. (Dispensable(x) -> EnvironmentFriendly(x))",
    "all x. (Woodware(x) -> Dispensable(x))",
    "all x. (Paper(x) -> Woodware(x))",
    "all x. (Good(x) -> -Bad(x))",
    "all x. (EnvironmentFriendly(x) -> Good(x))",
    "((Paper(Worksheet) & -EnvironmentFriendly(Worksheet))"
    " | (-Paper(Worksheet) & EnvironmentFriendly(Worksheet)))",
]


def main():
    assert neurosym.parse("all x. P(x) & Q(x) -> R(x)") == "all x. ((P(x) & Q(x)) -> R(x))"
    assert neurosym.parse("∀x (Cat(x) → Animal(tom))", dialect="folio") == "all x. (Cat(x) -> Animal(Tom))"
    try:
        neurosym.parse("all x. P(x")
    except ValueError as e:
        print("parse error:", e)
    else:
        raise AssertionError("unbalanced input parsed")

    f = neurosym.Formula("P(x) -> exists y. R(x, y)")
    assert f.free_vars() == ["x"]
    assert str(f.close()).startswith("all x.")
    print("nnf:", f.nnf())

    sig = neurosym.check_signature(["Likes(Ann, Bob)", "all x. (Likes(x, x) -> Happy(x))"])
    assert sig["predicates"] == {"Likes": [2], "Happy": [1]}
    try:
        neurosym.check_signature(["Summer(Day)", "Summer"])
    except ValueError as e:
        assert "Summer/1, Summer/0" in str(e)

    print("clauses:", neurosym.clausify(["all x. (P(x) <-> Q(x))"]))

    verdict = neurosym.decide(WORKSHEET, "-Dispensable(Worksheet)")
    assert verdict == {"label": "Uncertain", "resource_limited": False, "premises_inconsistent": False}, verdict
    assert neurosym.decide(WORKSHEET, "Good(Worksheet)")["label"] == "True"
    assert neurosym.evaluate_program(["P(A)"], "all x. (P(x)")[0] == "Error"

    assert neurosym.majority_vote(["True", "Error", "True", "False"]) == "True"
    assert neurosym.majority_vote(["False", "True"]) == "False"

    prompt = neurosym.build_prompt("linc", ["Tom is a cat."], "Tom is an animal.", k_shot=1)
    assert prompt.endswith("<EVALUATE>\n")
    payload = neurosym.extract("linc", "TEXT:\tTom is a cat.\nFOL:\tCat(Tom)\nTEXT:\tTom is an animal.\nFOL:\tAnimal(Tom)\n")
    assert payload == {"kind": "fol-program", "premise_fols": ["Cat(Tom)"], "conclusion_fol": "Animal(Tom)"}, payload

    assert neurosym.similarity(["True", "False", "Uncertain"], ["True", "Uncertain", "Uncertain"], ["False"] * 3) == 2 / 3
    assert abs(neurosym.mcnemar(10, 0) - 0.004426525857919831) < 1e-9
    mean, std = neurosym.bootstrap_accuracy([(["True"] * 6 + ["False"] * 4, "True")], k=1, iterations=1000, seed=7)
    assert abs(mean - 0.6) < 0.05, mean

    print("smoke test passed")


if __name__ == "__main__":
    main()

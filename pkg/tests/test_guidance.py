import pytest

from pc4pm import (
    GuideQuery,
    TechniqueSignature,
    filter_techniques,
    registry,
    runner_schema,
    runner_schemas,
)
from pc4pm.errors import ModelInvariantError, UnknownTechnique


def test_registry_lists_six_techniques():
    ids = [s.technique_id for s in registry()]
    assert ids == [
        "group-privacy",
        "dp-engine",
        "connector-dfg",
        "role-miner",
        "anon-ops",
        "privacy-analysis",
    ]
    for signature in registry():
        assert signature.summary  # every entry explains itself


def test_signature_facts():
    by_id = {s.technique_id: s for s in registry()}
    assert by_id["role-miner"].pmps == frozenset({"organizational"})
    assert by_id["role-miner"].prps == frozenset({"resource"})
    assert by_id["connector-dfg"].pmac == frozenset({"discovery"})
    assert by_id["privacy-analysis"].prac == frozenset({"PrAn"})
    assert by_id["group-privacy"].prac == frozenset({"PPDP"})
    assert "time" in by_id["dp-engine"].pmps


def test_signature_validation():
    with pytest.raises(ModelInvariantError):
        TechniqueSignature("x", "s", frozenset(), frozenset({"discovery"}),
                           frozenset({"case"}), frozenset({"PPDP"}))
    with pytest.raises(ModelInvariantError):
        TechniqueSignature("x", "s", frozenset({"astral"}), frozenset({"discovery"}),
                           frozenset({"case"}), frozenset({"PPDP"}))


def test_wildcard_query_returns_everything():
    assert filter_techniques(GuideQuery()) == [s.technique_id for s in registry()]


def test_filter_role_mining_activity():
    got = filter_techniques(GuideQuery(pmac="role-mining"))
    assert got == ["role-miner", "anon-ops", "privacy-analysis"]


def test_filter_analysis_only():
    assert filter_techniques(GuideQuery(prac="PrAn")) == ["privacy-analysis"]


def test_filter_conjunction():
    got = filter_techniques(GuideQuery(pmps="control-flow", pmac="discovery", prac="PPDP"))
    assert got == ["group-privacy", "dp-engine", "connector-dfg", "anon-ops"]
    narrow = filter_techniques(GuideQuery(pmps="organizational", prac="PPDP"))
    assert narrow == ["role-miner", "anon-ops"]


def test_filter_is_anti_monotone():
    base = set(filter_techniques(GuideQuery(pmps="time")))
    tighter = set(filter_techniques(GuideQuery(pmps="time", pmac="performance")))
    tightest = set(filter_techniques(GuideQuery(pmps="time", pmac="performance", prps="case")))
    assert tightest <= tighter <= base


def test_query_rejects_unknown_choices():
    with pytest.raises(ModelInvariantError):
        GuideQuery(pmps="spiritual")
    with pytest.raises(ModelInvariantError):
        GuideQuery(prac="PPXX")


def test_runner_schemas_cover_all_runnable_ids():
    runners = runner_schemas()
    assert sorted(runners) == [
        "anon-ops.add_noise",
        "anon-ops.condense",
        "anon-ops.de_pseudonymize",
        "anon-ops.generalize",
        "anon-ops.pseudonymize",
        "anon-ops.substitute",
        "anon-ops.suppress",
        "anon-ops.swap",
        "connector-dfg",
        "dp-engine",
        "group-privacy",
        "role-miner",
    ]


def params_of(schema):
    return {p["name"]: p for p in schema["parameters"]}


def test_every_parameter_has_help_and_valid_type():
    kinds = {"integer", "real", "string", "boolean", "choice", "list", "object"}
    for technique_id, schema in runner_schemas().items():
        assert schema["summary"], technique_id
        assert schema["technique"] == technique_id.split(".")[0]
        assert schema["input_kinds"] == ["xes"]
        for param in schema["parameters"]:
            name = param["name"]
            assert param["type"] in kinds, (technique_id, name)
            assert param["help"].strip(), (technique_id, name)
            if param["type"] == "choice":
                assert param["choices"], (technique_id, name)
                if "default" in param:
                    assert param["default"] in param["choices"]


def test_specific_schema_facts():
    dp = params_of(runner_schema("dp-engine"))
    assert dp["epsilon"]["required"] is True
    assert dp["epsilon"]["min"] == 0 and dp["epsilon"]["exclusive_min"] is True
    gp = params_of(runner_schema("group-privacy"))
    assert gp["knowledge_kind"]["type"] == "choice"
    assert set(gp["knowledge_kind"]["choices"]) == {"set", "multiset", "subsequence"}
    gen = params_of(runner_schema("anon-ops.generalize"))
    assert "granularity" in gen and "taxonomy" in gen
    assert "default" not in gen["granularity"]
    pseud = params_of(runner_schema("anon-ops.pseudonymize"))
    assert pseud["key_env"]["type"] == "string"
    assert pseud["mode"]["default"] == "pseudonymize-deterministic"


def test_unknown_technique_schema():
    with pytest.raises(UnknownTechnique):
        runner_schema("anon-ops")  # signature group, not a runnable id
    with pytest.raises(UnknownTechnique):
        runner_schema("nope")

"""Document parsing, serialization, and the network-to-tree step."""
import json

import pytest

from beliefprop.frames import FrameCapError
from beliefprop.markov import NotATreeError
from beliefprop.network import (
    NetworkFormatError,
    network_from_doc,
    network_hypergraph,
    network_to_doc,
    network_tree,
    parse_network,
    render_network,
)

from conftest import load_doc, load_text


FIXTURES = [
    "net_a.json",
    "example1.json",
    "example2.json",
    "star.json",
    "fragment.json",
]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_parse_and_round_trip(name):
    net = parse_network(load_text(name))
    again = parse_network(render_network(net))
    assert again == net
    assert network_to_doc(again) == network_to_doc(net)


def test_net_a_shape(net_a_doc):
    net = network_from_doc(net_a_doc)
    assert [v.name for v in net.variables] == ["a", "b"]
    assert [b.id for b in net.beliefs] == ["m_a", "m_ab"]
    assert net.tree is None and net.root is None
    assert net.belief("m_a").mass.focal[0b10] == pytest.approx(0.6)
    with pytest.raises(KeyError):
        net.belief("nope")


def test_replace_belief_swaps_one_declaration(net_a_doc):
    net = network_from_doc(net_a_doc)
    new = net.belief("m_ab").mass
    replaced = net.replace_belief("m_a", net.belief("m_a").mass)
    assert replaced == net
    with pytest.raises(KeyError):
        net.replace_belief("nope", new)


def fail(doc, needle):
    with pytest.raises(NetworkFormatError) as err:
        network_from_doc(doc)
    assert needle in str(err.value)
    return err.value


def test_document_error_reporting():
    fail([], "must be an object")
    fail({"variables": [], "nope": 1}, "unknown top-level keys")
    fail({"variables": "x"}, "variables")
    fail({"variables": [{"name": "a", "frame": []}]}, "a")
    fail(
        {"variables": [{"name": "a", "frame": ["0", "1"]}], "beliefs": "x"},
        "beliefs must be a list",
    )
    base = {"variables": [{"name": "a", "frame": ["0", "1"]}]}
    fail(
        {**base, "beliefs": [{"id": "b", "scope": ["z"], "focal": []}]},
        "z",
    )
    fail(
        {
            **base,
            "beliefs": [
                {"id": "b", "scope": ["a"], "focal": [{"set": "*", "mass": 0.5}]}
            ],
        },
        "sum to",
    )
    err = fail(
        {
            **base,
            "beliefs": [
                {
                    "id": "b",
                    "scope": ["a"],
                    "focal": [
                        {"set": [{"a": "1"}], "mass": 0.5},
                        {"set": [{"a": "1"}], "mass": 0.5},
                    ],
                }
            ],
        },
        "appears twice",
    )
    assert "focal[1]" in err.path
    dup = {
        **base,
        "beliefs": [
            {"id": "b", "scope": ["a"], "focal": [{"set": "*", "mass": 1}]},
            {"id": "b", "scope": ["a"], "focal": [{"set": "*", "mass": 1}]},
        ],
    }
    fail(dup, "duplicate belief id")


def test_json_errors_carry_the_line():
    with pytest.raises(NetworkFormatError) as err:
        parse_network('{\n "variables": [,]\n}\n')
    assert err.value.line == 2


def test_cap_applies_to_declared_scopes():
    doc = {
        "variables": [
            {"name": f"v{i:02d}", "frame": ["0", "1"]} for i in range(17)
        ],
        "beliefs": [
            {
                "id": "wide",
                "scope": [f"v{i:02d}" for i in range(17)],
                "focal": [{"set": "*", "mass": 1}],
            }
        ],
    }
    with pytest.raises(FrameCapError):
        network_from_doc(doc)
    assert network_from_doc(doc, cap=1 << 17).beliefs[0].id == "wide"


def test_explicit_tree_is_checked():
    base = {
        "variables": [
            {"name": "a", "frame": ["0", "1"]},
            {"name": "b", "frame": ["0", "1"]},
        ],
        "beliefs": [
            {"id": "on_a", "scope": ["a"], "focal": [{"set": "*", "mass": 1}]},
            {"id": "on_b", "scope": ["b"], "focal": [{"set": "*", "mass": 1}]},
        ],
    }
    good = {
        **base,
        "tree": {"nodes": [["a"], ["a", "b"], ["b"]], "edges": [[0, 1], [1, 2]]},
    }
    net = network_from_doc(good)
    assert net.tree is not None
    assert net.tree.synthetic == {net.scope_for(["a", "b"])}

    with pytest.raises(NotATreeError):
        network_from_doc(
            {
                **base,
                "tree": {"nodes": [["a"], ["b"]], "edges": []},
            }
        )
    # a tree over the right nodes can still break the Markov property
    with pytest.raises(NotATreeError) as err:
        network_from_doc(
            {
                **base,
                "tree": {
                    "nodes": [["a"], ["b"], ["a", "b"]],
                    "edges": [[0, 1], [1, 2]],
                },
            }
        )
    assert "['a']" in str(err.value) and "['b']" in str(err.value)
    fail_tree = {
        **base,
        "tree": {"nodes": [["a"], ["b"]], "edges": [[0, 2]]},
    }
    with pytest.raises(NetworkFormatError):
        network_from_doc(fail_tree)
    with pytest.raises(NetworkFormatError) as err:
        network_from_doc(
            {**base, "tree": {"nodes": [["a"]], "edges": []}}
        )
    assert "covers no node" in str(err.value) or "scope" in str(err.value)


def test_hypergraph_adds_singletons_for_uncovered_variables():
    doc = {
        "variables": [
            {"name": "a", "frame": ["0", "1"]},
            {"name": "z", "frame": ["0", "1"]},
        ],
        "beliefs": [
            {"id": "on_a", "scope": ["a"], "focal": [{"set": "*", "mass": 1}]}
        ],
    }
    net = network_from_doc(doc)
    h = network_hypergraph(net)
    assert {e.names for e in h.edges} == {("a",), ("z",)}
    rooted = network_tree(net)
    assert net.scope_for(["z"]) in rooted.tree.synthetic


def test_network_tree_honors_document_and_argument_roots(star_doc):
    net = network_from_doc(star_doc)
    rooted = network_tree(net)
    assert rooted.root == net.scope_for(["t", "x"])
    g = net.scope_for(["x"])
    assert network_tree(net, g).root == g
    # children keep the order the nodes were declared in
    kids = network_tree(net, g).children[g]
    assert [list(k.names) for k in kids] == [
        ["u", "x"],
        ["v", "x"],
        ["w", "x"],
        ["t", "x"],
    ]
    kids = rooted.children[g]
    assert [list(k.names) for k in kids] == [["u", "x"], ["v", "x"], ["w", "x"]]

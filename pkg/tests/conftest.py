"""Shared fixtures: the HIV-in-plasma model, recorded extracts, transports."""

from __future__ import annotations

import json
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import pytest

from modeltour.errors import TransportFailure
from modeltour.foraging import build_skeleton, forage_functional_edges
from modeltour.model import parse_model
from modeltour.story import Description, SourceKind

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

# Recorded extract texts, keyed by page title.  Titles absent here answer
# with the missing-page marker.
EXTRACTS = {
    "Albumin": (
        "Albumin is a family of globular proteins, the most common of which are "
        "the serum albumins. All of the proteins of the albumin family are "
        "water-soluble."
    ),
    "HIV": (
        "The human immunodeficiency virus is a retrovirus that attacks the immune "
        "system. It infects helper T cells and gradually weakens the body's "
        "defenses against infection."
    ),
    "Capsid": (
        "The capsid is the protein shell of a virus. It encloses and protects the "
        "RNA of the virus, and it is built from many copies of a few proteins."
    ),
    "RNA": (
        "Ribonucleic acid is a molecule essential for coding, decoding, regulation "
        "and expression of genes. In many viruses it carries the genetic "
        "information of the virus."
    ),
    "Reverse Transcriptase": (
        "Reverse transcriptase is an enzyme that generates DNA from an RNA "
        "template. Retroviruses rely on the enzyme to copy their genome before "
        "integration."
    ),
    "Blood plasma": (
        "Blood plasma is the liquid component of blood that holds the blood cells "
        "in suspension. It is mostly water and contains dissolved proteins, "
        "glucose, and hormones."
    ),
}


def extract_response(title: str) -> str:
    """A response body in the shape the extract API returns."""
    if title in EXTRACTS:
        page = {"pageid": 1000 + sorted(EXTRACTS).index(title), "ns": 0,
                "title": title, "extract": EXTRACTS[title]}
        return json.dumps({"batchcomplete": "", "query": {"pages": {str(page["pageid"]): page}}})
    return json.dumps(
        {"batchcomplete": "", "query": {"pages": {"-1": {"ns": 0, "title": title, "missing": ""}}}}
    )


class FixtureTransport:
    """Replays recorded responses; records every requested title."""

    def __init__(self):
        self.requested: list[str] = []

    def get(self, url: str, timeout: float) -> str:
        title = parse_qs(urlparse(url).query)["titles"][0]
        self.requested.append(title)
        return extract_response(title)


class FailingTransport:
    """Trips the test if any network call is attempted."""

    def get(self, url: str, timeout: float) -> str:
        raise AssertionError(f"unexpected network call: {url}")


class BrokenTransport:
    """Simulates a network-level failure."""

    def get(self, url: str, timeout: float) -> str:
        raise TransportFailure("connection refused")


@pytest.fixture
def hiv_model_bytes() -> bytes:
    return (FIXTURES / "hiv_model.json").read_bytes()


@pytest.fixture
def hiv_model(hiv_model_bytes):
    return parse_model(hiv_model_bytes)


@pytest.fixture
def hiv_graph(hiv_model):
    """Skeleton plus the recorded remote descriptions and functional edges.

    Matches what foraging produces against the fixture transport, without
    touching the sources machinery.
    """
    graph = build_skeleton(hiv_model)
    title_by_node = {
        "hiv": "HIV",
        "plasma": "Blood plasma",
        "capsid": "Capsid",
        "rna": "RNA",
        "rt": "Reverse Transcriptase",
    }
    for node_id, title in title_by_node.items():
        graph.nodes[node_id].descriptions.append(
            Description(
                source=SourceKind.REMOTE,
                text=EXTRACTS[title],
                repository="wikipedia",
                url=f"https://en.wikipedia.org/w/api.php?titles={title}",
                language="en",
            )
        )
    graph.nodes["root"].descriptions.append(Description(source=SourceKind.FALLBACK))
    forage_functional_edges(graph)
    return graph

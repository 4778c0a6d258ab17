"""KE dialogue generation: batch, per-KB and iterative graph modes, plus synthetic corpora."""

from ke_dial.genpipe.corpus import GeneratedCorpus, Provenance, corpus_stats
from ke_dial.genpipe.graph import ZHistory, generate_graph_iterative, select_subgraph
from ke_dial.genpipe.rng import SplitMix64
from ke_dial.genpipe.synth import SynthCorpus, synth_corpus, synth_graph, synth_graph_templates
from ke_dial.genpipe.table import generate_per_kb, generate_table

__all__ = [
    "GeneratedCorpus",
    "Provenance",
    "SplitMix64",
    "SynthCorpus",
    "ZHistory",
    "corpus_stats",
    "generate_graph_iterative",
    "generate_per_kb",
    "generate_table",
    "select_subgraph",
    "synth_corpus",
    "synth_graph",
    "synth_graph_templates",
]

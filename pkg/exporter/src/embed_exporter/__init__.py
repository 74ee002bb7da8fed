"""Transformer embedding exporter.

Runs a pretrained checkpoint over a JSONL corpus and writes vectors in the
politopics embedding file format (JSON header line, then one
``doc-id v1 ... vd`` line per document).
"""

from .exporter import ExportConfig, ExportResult, export, pool_hidden_states

__all__ = ["ExportConfig", "ExportResult", "export", "pool_hidden_states"]

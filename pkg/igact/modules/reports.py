import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from .monoid import GreenPartitions, MonoidTable
from .words import DerivationCertificate


def dumps(document: Any) -> str:
    """Stable text for a document: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], document: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document), encoding="utf-8")
    return path


def read_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc


def write_certificate(path: Union[str, Path], cert: DerivationCertificate, label: str = "") -> Path:
    doc: Dict[str, Any] = cert.to_document()
    if label:
        doc["label"] = label
    return write_json(path, doc)


def read_certificate(path: Union[str, Path]) -> DerivationCertificate:
    return DerivationCertificate.from_document(read_json(path))


def monoid_dump(monoid: MonoidTable, greens: Optional[GreenPartitions] = None) -> Dict[str, Any]:
    """Every element with its rank, idempotency and (optionally) Green's class labels."""
    idem = set(monoid.idempotents)
    doc = monoid.to_document()
    doc["group_table"] = monoid.group.to_document()
    for row in doc["elements"]:
        idx = row["id"]
        row["rank"] = int(monoid.ranks[idx])
        row["idempotent"] = idx in idem
        if greens is not None:
            row["classes"] = {rel: getattr(greens, rel)[idx] for rel in ("r", "l", "h", "d")}
    return doc


def build_summary(monoid: MonoidTable, rees_document: Mapping[str, Any], shape: Mapping[str, int]) -> Dict[str, Any]:
    return {
        "group": monoid.group.to_document(),
        "n": monoid.n,
        "size": monoid.size,
        "idempotents": len(monoid.idempotents),
        "rank_one": dict(shape),
        "rees": dict(rees_document),
    }

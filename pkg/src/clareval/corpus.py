"""Corpus data model, canonical JSON format, validation, and statistics.

A corpus bundles scenes (lists of objects with attribute metadata) with
dialogues made of user/assistant utterance pairs.  The ambiguity flag
and the gold referenced-object set attach to the user side of each
pair.  Corpora are immutable after loading; every function here is a
pure function of its inputs, so a loaded corpus can be shared freely
across parallel workers.

Canonical on-disk format: a single UTF-8 JSON document with top-level
keys ``corpus_id``, ``scenes`` (map scene_id -> scene) and
``dialogues`` (ordered array).  Field names match the dataclasses
below.  Object-id sets are serialized as sorted integer arrays;
optional fields are omitted, never null.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import CorpusValidationError, SchemaError


@dataclass(frozen=True)
class SceneObject:
    """One object in a scene, identified by its canonical integer id.

    ``attributes`` is an open string-keyed map (type, color, brand,
    pattern, state, ...); fashion and furniture metadata use different
    schemas, so no closed enum is imposed.  ``bbox`` is (x, y, width,
    height) in pixels; ``position`` is a 3-tuple of scene coordinates.
    """

    object_id: int
    attributes: dict[str, str] = field(default_factory=dict)
    bbox: tuple[float, float, float, float] | None = None
    position: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class Scene:
    scene_id: str
    objects: tuple[SceneObject, ...] = ()

    def object_ids(self) -> frozenset[int]:
        return frozenset(o.object_id for o in self.objects)


@dataclass(frozen=True)
class Turn:
    """A user/assistant utterance pair."""

    turn_idx: int
    user_utterance: str
    system_utterance: str
    user_referenced_objects: frozenset[int] = frozenset()
    is_ambiguous: bool = False
    scene_id: str = ""


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    turns: tuple[Turn, ...]
    domain_label: str | None = None


@dataclass(frozen=True)
class Corpus:
    corpus_id: str
    scenes: dict[str, Scene]
    dialogues: tuple[Dialogue, ...]

    def iter_turns(self) -> Iterator[tuple[Dialogue, Turn]]:
        for dialogue in self.dialogues:
            for turn in dialogue.turns:
                yield dialogue, turn

    def get_dialogue(self, dialogue_id: str) -> Dialogue:
        for dialogue in self.dialogues:
            if dialogue.dialogue_id == dialogue_id:
                return dialogue
        raise KeyError(dialogue_id)

    def scene_for(self, turn: Turn) -> Scene | None:
        return self.scenes.get(turn.scene_id)

    def n_turns(self) -> int:
        return sum(len(d.turns) for d in self.dialogues)


@dataclass(frozen=True)
class CorpusStats:
    """Aggregate corpus statistics.

    Standard deviations are population SDs (divide by n).
    """

    n_dialogues: int
    mean_turn_pairs: float
    sd_turn_pairs: float
    mean_scene_objects: float
    max_scene_objects: int
    mean_unique_referenced_per_dialogue: float
    sd_unique_referenced: float


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    message: str
    dialogue_id: str | None = None
    turn_idx: int | None = None
    scene_id: str | None = None

    def locus(self) -> str:
        parts = []
        if self.dialogue_id is not None:
            parts.append(f"dialogue {self.dialogue_id!r}")
        if self.turn_idx is not None:
            parts.append(f"turn {self.turn_idx}")
        if self.scene_id is not None:
            parts.append(f"scene {self.scene_id!r}")
        return ", ".join(parts) if parts else "corpus"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "error")

    @property
    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_corpus(corpus: Corpus, mode: str = "strict") -> ValidationReport:
    """Check every corpus invariant and report violations as data.

    Reference-level problems (a turn pointing at a missing scene, a
    gold object id absent from its scene, an empty scene) are errors in
    strict mode and warnings in lenient mode.  Structural problems
    (duplicate ids, non-contiguous turn indices, empty dialogues,
    degenerate bounding boxes) are errors in both modes.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown validation mode: {mode!r}")
    ref_severity = "error" if mode == "strict" else "warning"
    found: list[Violation] = []

    for scene_id, scene in corpus.scenes.items():
        if scene.scene_id != scene_id:
            found.append(Violation("error", f"scene map key {scene_id!r} does not match scene_id {scene.scene_id!r}", scene_id=scene_id))
        if not scene.objects:
            found.append(Violation(ref_severity, "scene has no objects", scene_id=scene_id))
        seen_ids: set[int] = set()
        for obj in scene.objects:
            if obj.object_id in seen_ids:
                found.append(Violation("error", f"duplicate object_id {obj.object_id}", scene_id=scene_id))
            seen_ids.add(obj.object_id)
            if obj.bbox is not None and (obj.bbox[2] <= 0 or obj.bbox[3] <= 0):
                found.append(Violation("error", f"object {obj.object_id} bbox width/height must be positive", scene_id=scene_id))

    seen_dialogues: set[str] = set()
    for dialogue in corpus.dialogues:
        if dialogue.dialogue_id in seen_dialogues:
            found.append(Violation("error", f"duplicate dialogue_id {dialogue.dialogue_id!r}", dialogue_id=dialogue.dialogue_id))
        seen_dialogues.add(dialogue.dialogue_id)
        if not dialogue.turns:
            found.append(Violation("error", "dialogue has no turns", dialogue_id=dialogue.dialogue_id))
        for pos, turn in enumerate(dialogue.turns):
            if turn.turn_idx != pos:
                found.append(Violation("error", f"turn_idx {turn.turn_idx} does not match position {pos}", dialogue_id=dialogue.dialogue_id, turn_idx=turn.turn_idx))
            scene = corpus.scenes.get(turn.scene_id)
            if scene is None:
                found.append(Violation(ref_severity, f"turn references unknown scene {turn.scene_id!r}", dialogue_id=dialogue.dialogue_id, turn_idx=turn.turn_idx))
            else:
                missing = turn.user_referenced_objects - scene.object_ids()
                if missing:
                    found.append(Violation(ref_severity, f"referenced object ids {sorted(missing)} not in scene {turn.scene_id!r}", dialogue_id=dialogue.dialogue_id, turn_idx=turn.turn_idx))

    return ValidationReport(tuple(found))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Compute per-corpus statistics; an empty corpus yields zeros."""
    turn_counts = [len(d.turns) for d in corpus.dialogues]
    scene_sizes = [len(s.objects) for s in corpus.scenes.values()]
    unique_refs = [len(frozenset().union(*(t.user_referenced_objects for t in d.turns))) if d.turns else 0
                   for d in corpus.dialogues]
    return CorpusStats(
        n_dialogues=len(corpus.dialogues),
        mean_turn_pairs=statistics.fmean(turn_counts) if turn_counts else 0.0,
        sd_turn_pairs=statistics.pstdev(turn_counts) if turn_counts else 0.0,
        mean_scene_objects=statistics.fmean(scene_sizes) if scene_sizes else 0.0,
        max_scene_objects=max(scene_sizes) if scene_sizes else 0,
        mean_unique_referenced_per_dialogue=statistics.fmean(unique_refs) if unique_refs else 0.0,
        sd_unique_referenced=statistics.pstdev(unique_refs) if unique_refs else 0.0,
    )


# ---------------------------------------------------------------------------
# Canonical JSON serialization


def _require(mapping, key, kind, locus):
    if not isinstance(mapping, dict):
        raise SchemaError(f"{locus}: expected an object")
    if key not in mapping:
        raise SchemaError(f"{locus}: missing field {key!r}")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{locus}: field {key!r} must be a number")
        return float(value)
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{locus}: field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise SchemaError(f"{locus}: field {key!r} must be {kind.__name__}")
    return value


def _int_set(value, locus) -> frozenset[int]:
    if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise SchemaError(f"{locus}: expected an array of integers")
    return frozenset(value)


def _number_tuple(value, length, locus):
    if not isinstance(value, list) or len(value) != length or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
        raise SchemaError(f"{locus}: expected an array of {length} numbers")
    return tuple(float(v) for v in value)


def scene_object_from_dict(doc, locus) -> SceneObject:
    object_id = _require(doc, "object_id", int, locus)
    attrs_raw = _require(doc, "attributes", dict, locus)
    attributes = {}
    for key, value in attrs_raw.items():
        if not isinstance(key, str) or not isinstance(value, str):
            raise SchemaError(f"{locus}: attributes must map strings to strings")
        attributes[key] = value
    bbox = _number_tuple(doc["bbox"], 4, locus) if "bbox" in doc else None
    position = _number_tuple(doc["position"], 3, locus) if "position" in doc else None
    return SceneObject(object_id=object_id, attributes=attributes, bbox=bbox, position=position)


def corpus_from_dict(doc) -> Corpus:
    """Build a Corpus from a parsed canonical document.

    Raises SchemaError with a dialogue/turn locus on any missing or
    mistyped field; reference checks are left to validate_corpus.
    """
    corpus_id = _require(doc, "corpus_id", str, "corpus")
    scenes_raw = _require(doc, "scenes", dict, "corpus")
    dialogues_raw = _require(doc, "dialogues", list, "corpus")

    scenes: dict[str, Scene] = {}
    for scene_id in sorted(scenes_raw):
        scene_doc = scenes_raw[scene_id]
        locus = f"scene {scene_id!r}"
        declared = _require(scene_doc, "scene_id", str, locus)
        objects_raw = _require(scene_doc, "objects", list, locus)
        objects = tuple(scene_object_from_dict(o, f"{locus} object #{i}") for i, o in enumerate(objects_raw))
        scenes[scene_id] = Scene(scene_id=declared, objects=objects)

    dialogues = []
    for dlg_doc in dialogues_raw:
        dialogue_id = _require(dlg_doc, "dialogue_id", str, "dialogue")
        turns_raw = _require(dlg_doc, "turns", list, f"dialogue {dialogue_id!r}")
        turns = []
        for turn_doc in turns_raw:
            idx = turn_doc.get("turn_idx") if isinstance(turn_doc, dict) else None
            locus = f"dialogue {dialogue_id!r} turn {idx}"
            turns.append(Turn(
                turn_idx=_require(turn_doc, "turn_idx", int, locus),
                user_utterance=_require(turn_doc, "user_utterance", str, locus),
                system_utterance=_require(turn_doc, "system_utterance", str, locus),
                user_referenced_objects=_int_set(
                    _require(turn_doc, "user_referenced_objects", list, locus), locus),
                is_ambiguous=_require(turn_doc, "is_ambiguous", bool, locus),
                scene_id=_require(turn_doc, "scene_id", str, locus),
            ))
        domain = dlg_doc.get("domain_label")
        if domain is not None and not isinstance(domain, str):
            raise SchemaError(f"dialogue {dialogue_id!r}: field 'domain_label' must be str")
        dialogues.append(Dialogue(dialogue_id=dialogue_id, turns=tuple(turns), domain_label=domain))

    return Corpus(corpus_id=corpus_id, scenes=scenes, dialogues=tuple(dialogues))


def corpus_to_dict(corpus: Corpus) -> dict:
    scenes = {}
    for scene_id in sorted(corpus.scenes):
        scene = corpus.scenes[scene_id]
        objects = []
        for obj in scene.objects:
            entry: dict = {"object_id": obj.object_id, "attributes": dict(obj.attributes)}
            if obj.bbox is not None:
                entry["bbox"] = list(obj.bbox)
            if obj.position is not None:
                entry["position"] = list(obj.position)
            objects.append(entry)
        scenes[scene_id] = {"scene_id": scene.scene_id, "objects": objects}
    dialogues = []
    for dialogue in corpus.dialogues:
        entry = {"dialogue_id": dialogue.dialogue_id}
        if dialogue.domain_label is not None:
            entry["domain_label"] = dialogue.domain_label
        entry["turns"] = [
            {
                "turn_idx": t.turn_idx,
                "user_utterance": t.user_utterance,
                "system_utterance": t.system_utterance,
                "user_referenced_objects": sorted(t.user_referenced_objects),
                "is_ambiguous": t.is_ambiguous,
                "scene_id": t.scene_id,
            }
            for t in dialogue.turns
        ]
        dialogues.append(entry)
    return {"corpus_id": corpus.corpus_id, "scenes": scenes, "dialogues": dialogues}


def dumps_canonical(corpus: Corpus) -> str:
    return json.dumps(corpus_to_dict(corpus), ensure_ascii=False, indent=2) + "\n"


def save_canonical_corpus(corpus: Corpus, path) -> None:
    Path(path).write_text(dumps_canonical(corpus), encoding="utf-8")


def _check_validation(corpus: Corpus, mode: str) -> Corpus:
    report = validate_corpus(corpus, mode=mode)
    if not report.ok:
        lines = [f"{v.locus()}: {v.message}" for v in report.errors]
        raise CorpusValidationError(
            f"corpus failed {mode} validation ({len(lines)} error(s)):\n  " + "\n  ".join(lines),
            report=report,
        )
    return corpus


def load_canonical_corpus(path, mode: str = "strict") -> Corpus:
    """Load and validate a canonical corpus file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return _check_validation(corpus_from_dict(doc), mode)

import json
import logging
from pathlib import Path
from typing import Dict, Union

from domain.exceptions.pipeline_exceptions import MissingArtifactError
from domain.repositories.artifact_repository import ArtifactRepository
from domain.value_objects.content_hash import ContentHash
from shared.constants import MANIFEST_FILE

logger = logging.getLogger(__name__)


class FileArtifactRepository(ArtifactRepository):
    """Run directory plus a sha256 manifest of everything written into it"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self._hashes: Dict[str, str] = {}

    def _path(self, name: str) -> Path:
        return self.root / name

    def write_bytes(self, name: str, payload: bytes) -> Path:
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
        self._hashes[name] = ContentHash.from_bytes(payload).value
        logger.debug("Wrote artifact", extra={"artifact": name, "size": len(payload)})
        return path

    def read_bytes(self, name: str) -> bytes:
        path = self._path(name)
        if not path.exists():
            raise MissingArtifactError(str(path))
        return path.read_bytes()

    def exists(self, name: str) -> bool:
        return self._path(name).exists()

    def record(self, name: str) -> str:
        digest = ContentHash.from_bytes(self.read_bytes(name)).value
        self._hashes[name] = digest
        return digest

    def record_tree(self, directory: str) -> None:
        base = self._path(directory)
        for path in sorted(base.rglob("*")):
            if path.is_file():
                self.record(path.relative_to(self.root).as_posix())

    def manifest(self) -> Dict[str, str]:
        return dict(sorted(self._hashes.items()))

    def write_manifest(self) -> Path:
        path = self._path(MANIFEST_FILE)
        document = {"algorithm": "sha256", "artifacts": self.manifest()}
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("Wrote run manifest", extra={"artifacts": len(self._hashes)})
        return path

    def load_manifest(self) -> Dict[str, str]:
        document = json.loads(self.read_bytes(MANIFEST_FILE).decode("utf-8"))
        return document["artifacts"]

import json
import shutil
import stat
from pathlib import Path

import pytest

from proofkit.toolchain import ManifestResolver

FIXTURE_ROOT = Path(__file__).parent / "fixtures" / "hello_bundle"

GREETING_SCRIPT = "#!/bin/sh\nprintf 'Hello, world!\\n'\n"

# A stub "compiler": writes a runnable greeting script to the path after -o.
COMPILER_SCRIPT = """#!/bin/sh
out=""
prev=""
for a in "$@"; do
  if [ "$prev" = "-o" ]; then out="$a"; fi
  prev="$a"
done
cat > "$out" <<'EOF'
#!/bin/sh
printf 'Hello, world!\\n'
EOF
chmod +x "$out"
"""


def write_stub(directory: Path, name: str, body: str) -> Path:
    path = directory / name
    path.write_text(body)
    path.chmod(path.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return path


@pytest.fixture(scope="session")
def stub_tools(tmp_path_factory):
    """Stub executables for every toolchain the fixture bundle names."""
    directory = tmp_path_factory.mktemp("stub-tools")
    tools = {}
    for name in ("go", "ts-node", "awk", "java"):
        tools[name] = str(write_stub(directory, name, GREETING_SCRIPT))
    for name in ("rustc", "cc"):
        tools[name] = str(write_stub(directory, name, COMPILER_SCRIPT))
    tools["javac"] = str(write_stub(directory, "javac", "#!/bin/sh\nexit 0\n"))
    return tools


@pytest.fixture
def hermetic_resolver(stub_tools):
    """Reference world: every toolchain present except javac/java."""
    tools = dict(stub_tools)
    tools["javac"] = None
    tools["java"] = None
    return ManifestResolver(tools)


@pytest.fixture
def full_resolver(stub_tools):
    return ManifestResolver(dict(stub_tools))


@pytest.fixture
def empty_resolver():
    return ManifestResolver({})


def write_manifest(path: Path, tools: dict) -> Path:
    path.write_text(json.dumps(tools))
    return path


@pytest.fixture
def bundle_copy(tmp_path):
    """Mutable copy of the reference fixture for injection tests."""
    dest = tmp_path / "hello_bundle"
    shutil.copytree(FIXTURE_ROOT, dest)
    return dest

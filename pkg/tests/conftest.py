import importlib.util
import pathlib
import sys

import pytest

root_dir = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(root_dir))

from modules.densmat.state import MAX_QUBITS, set_max_qubits  # noqa: E402
from modules.noise.device import load_device_config, uniform_device_config  # noqa: E402
from modules.noise.model import NoiseModel  # noqa: E402
from modules.protocols.generation import EPSource  # noqa: E402
from modules.selector.request import SelectionRequest  # noqa: E402


@pytest.fixture(scope='session')
def root() -> pathlib.Path:
    return root_dir


@pytest.fixture(scope='session')
def fixtures_dir() -> pathlib.Path:
    return root_dir / 'fixtures'


@pytest.fixture(scope='session')
def cairo_config(fixtures_dir):
    return load_device_config(fixtures_dir / 'ibm_cairo_like.json')


@pytest.fixture
def noiseless_config():
    return uniform_device_config(12, name='noiseless')


@pytest.fixture
def noiseless_model(noiseless_config):
    return NoiseModel(noiseless_config)


@pytest.fixture
def instant_source():
    return EPSource(0.)


@pytest.fixture
def noiseless_request(noiseless_config):
    return SelectionRequest(
        f_in=0.7, tau=0., throughput_n=1, buffer_size=12, config=noiseless_config, t_qos=1., f_out_target=0.9
    )


@pytest.fixture
def qubit_cap():
    """
    Lets a test lower the dense simulation cap; the default is restored afterwards.
    """
    yield set_max_qubits
    set_max_qubits(MAX_QUBITS)


@pytest.fixture(scope='session')
def purify_cli():
    spec = importlib.util.spec_from_file_location('purify', root_dir / 'scripts' / 'purify.py')
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module

import pytest

from app import API_COMMANDS, App
from core.parsers import DumpParser
from tests.conftest import EXAMPLE_KEYS

JSON = {'Accept': 'application/json'}


@pytest.fixture
def client():
    app = App(__name__)
    app.testing = True
    return app.test_client()


def test_home_page_lists_commands(client):
    response = client.get('/', headers=JSON)
    assert response.status_code == 200
    assert response.get_json() == API_COMMANDS


def test_home_page_as_text(client):
    response = client.get('/', headers={'Accept': 'text/html'})
    assert response.mimetype == 'text/plain'
    assert '/query' in response.get_data(as_text=True)


def test_query_on_random_trie(client):
    response = client.get('/query?x=0110&random_keys=8&key_len=8&seed=3', headers=JSON)
    assert response.status_code == 200
    body = response.get_json()
    assert body['query'] == '0110'
    assert body['correct'] is True
    assert body['key'] is not None


def test_query_rejects_non_bit_labels(client):
    response = client.get('/query?x=2', headers=JSON)
    assert response.status_code == 400
    assert 'error' in response.get_json()


def test_bad_integer_argument(client):
    response = client.get('/run?random_keys=many', headers=JSON)
    assert response.status_code == 400


def test_run_small_scenario(client):
    response = client.get('/run?random_keys=5&key_len=6&seed=2&corruption=medium&strict=1', headers=JSON)
    assert response.status_code == 200
    body = response.get_json()
    assert body['converged'] is True
    assert body['num_keys'] == 5


def test_check_legal_dump(client, example_state):
    response = client.post('/check', data=DumpParser.dumps(example_state, EXAMPLE_KEYS), headers=JSON)
    assert response.status_code == 200
    body = response.get_json()
    assert body['legal'] is True
    assert body['violations'] == []


def test_check_corrupted_dump(client, example_state):
    example_state.responsible_peer('0').store['0'].child1 = None
    response = client.post('/check', data=DumpParser.dumps(example_state, EXAMPLE_KEYS), headers=JSON)
    body = response.get_json()
    assert body['legal'] is False
    assert body['violations']


def test_check_malformed_dump(client):
    response = client.post('/check', data='{}', headers=JSON)
    assert response.status_code == 400

import logging
import os

# Simulation defaults
simulation = {
    'peers': 8,
    'max_label_bits': 64,
    'max_rounds': 10000,
    'closure_rounds': 1000,
    'measure_rounds': 50,
    'seed': 0,
    'random_keys': 16,
    'key_len': 12,
}

# Corruption levels: number of scripted mutations per category
corruption = {
    'levels': {
        'none': {},
        'low': {
            'clear-edge': 2, 'scramble-edge': 1, 'delete-node': 1, 'add-spurious-patricia': 1,
            'add-spurious-msd': 1, 'move-key-to-wrong-label': 1, 'misplace-node-at-wrong-peer': 1,
            'corrupt-key2-slot': 1, 'corrupt-r': 1, 'inject-stray-message': 2,
        },
        'medium': {
            'clear-edge': 4, 'scramble-edge': 3, 'delete-node': 3, 'add-spurious-patricia': 2,
            'add-spurious-msd': 2, 'move-key-to-wrong-label': 2, 'misplace-node-at-wrong-peer': 3,
            'corrupt-key2-slot': 2, 'corrupt-r': 2, 'inject-stray-message': 5,
        },
        'high': {
            'clear-edge': 8, 'scramble-edge': 6, 'delete-node': 6, 'add-spurious-patricia': 4,
            'add-spurious-msd': 4, 'move-key-to-wrong-label': 4, 'misplace-node-at-wrong-peer': 6,
            'corrupt-key2-slot': 4, 'corrupt-r': 4, 'inject-stray-message': 12,
        },
    },
    # delete every node that does not store a key
    'wipe_level': 'wipe',
}

# HTTP server
server = {
    'host': os.environ.get('SHPT_HOST', '0.0.0.0'),
    'port': int(os.environ.get('SHPT_PORT', '5000')),
}

# Logging
logs = {
    'level': os.environ.get('SHPT_LOG_LEVEL', 'WARNING'),
    'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
}


def corruption_levels() -> list:
    return list(corruption['levels']) + [corruption['wipe_level']]


def configure_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, logs['level'].upper(), logging.WARNING)
    logging.basicConfig(level=level, format=logs['format'])
    logging.getLogger().setLevel(level)


if __name__ == "__main__":
    configure_logging()
    for name in corruption_levels():
        print(name, corruption['levels'].get(name, 'every non-key node deleted'))

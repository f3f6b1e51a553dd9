import os
import sys

import yaml

hparams = {}


def override_config(old_config: dict, new_config: dict):
    for k, v in new_config.items():
        if isinstance(v, dict) and k in old_config and isinstance(old_config[k], dict):
            override_config(old_config[k], new_config[k])
        else:
            old_config[k] = v


def load_config(config_fn, loaded_config=None, config_chains=None):
    """
        Load one YAML settings file, resolving its *base_config* chain depth first.
        Relative base paths (starting with '.') are resolved against the including file.
    """
    if loaded_config is None:
        loaded_config = set()
    if config_chains is None:
        config_chains = []
    with open(config_fn, encoding='utf-8') as f:
        hparams_ = yaml.safe_load(f) or {}
    loaded_config.add(config_fn)
    if 'base_config' in hparams_:
        ret_hparams = {}
        if not isinstance(hparams_['base_config'], list):
            hparams_['base_config'] = [hparams_['base_config']]
        for c in hparams_['base_config']:
            if c.startswith('.'):
                c = os.path.normpath(os.path.join(os.path.dirname(config_fn), c))
            if c not in loaded_config:
                override_config(ret_hparams, load_config(c, loaded_config, config_chains))
        override_config(ret_hparams, hparams_)
    else:
        ret_hparams = hparams_
    config_chains.append(config_fn)
    return ret_hparams


def _apply_override(hparams_: dict, key: str, value: str):
    node = hparams_
    *parents, leaf = key.split('.')
    for p in parents:
        node = node.setdefault(p, {})
    if leaf not in node or node[leaf] is None:
        node[leaf] = yaml.safe_load(value)
    elif value in ['True', 'False', 'true', 'false'] or isinstance(node[leaf], bool):
        node[leaf] = value.lower() == 'true'
    elif isinstance(node[leaf], (list, dict)):
        node[leaf] = yaml.safe_load(value)
    else:
        node[leaf] = type(node[leaf])(value)


def set_hparams(config: str, hparams_str='', print_hparams=False, global_hparams=True):
    """
        Load hparams from multiple sources:
        1. config chain (i.e. first load base_config, then load config);
        2. argument --hparams or hparams_str, as temporary modification (dotted keys reach nested entries).
    """
    assert config != '', 'A settings file should be specified.'
    config_chains = []
    hparams_ = load_config(str(config), config_chains=config_chains)

    for new_hparam in hparams_str.split(','):
        if new_hparam.strip() == '':
            continue
        k, v = new_hparam.split('=', 1)
        _apply_override(hparams_, k.strip(), v.strip())

    if global_hparams:
        hparams.clear()
        hparams.update(hparams_)

    if print_hparams:
        print('| Hparams chains: ', config_chains, file=sys.stderr)
        print('| Hparams: ', file=sys.stderr)
        for k, v in sorted(hparams_.items()):
            print(f'|   {k}: {v}', file=sys.stderr)
    return hparams_

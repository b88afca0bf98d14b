import argparse
from typing import Dict, List

from config.schemas import MODEL_VARIANTS, SPLIT_KINDS
from utils.exceptions import ValidationError

PROG = 'hybridfm'


def int_list(value: str) -> List[int]:
    """`2,4,8` -> [2, 4, 8]"""
    try:
        return [int(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def name_list(value: str) -> List[str]:
    names = [v.strip() for v in value.split(',') if v.strip()]
    unknown = [n for n in names if n not in MODEL_VARIANTS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"unknown model variant(s) {unknown}; choose from {', '.join(MODEL_VARIANTS)}")
    return names


def parse_key_values(value: str) -> Dict[str, str]:
    """`n_users=100,noise=0.2` -> {'n_users': '100', 'noise': '0.2'}"""
    pairs = {}
    for chunk in value.split(','):
        if not chunk.strip():
            continue
        key, sep, raw = chunk.partition('=')
        if not sep or not key.strip():
            raise ValidationError(f"Expected key=value, got {chunk!r}", field_name='spec', field_value=value)
        pairs[key.strip()] = raw.strip()
    return pairs


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='dotenv-style settings file (HYBRIDFM_* keys)')
    parser.add_argument('--log-level', dest='log_level', help='DEBUG, INFO, WARNING or ERROR')
    parser.add_argument('--seed', type=int, help='seed for every random choice')


def _training(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--d', type=int, dest='latent_dim', help='latent dimensionality')
    parser.add_argument('--lr', type=float, dest='learning_rate', help='Adagrad base learning rate')
    parser.add_argument('--threads', type=int, help='training threads (1 is deterministic)')
    parser.add_argument('--epochs', type=int, dest='epochs_max', help='maximum epochs')
    parser.add_argument('--patience', type=int, dest='early_stop_patience', help='early-stopping patience')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description='Hybrid matrix factorisation with metadata features')
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    ingest = commands.add_parser('ingest', help='convert a raw corpus into a canonical dataset directory')
    sources = ingest.add_subparsers(dest='source', required=True, metavar='SOURCE')

    movielens = sources.add_parser('movielens', help='ratings (+ movies, tag genome)')
    _common(movielens)
    movielens.add_argument('--ratings', required=True, help='user::item::rating::timestamp file')
    movielens.add_argument('--genome', help='item, tag, relevance rows')
    movielens.add_argument('--tags', help='tag id -> tag name table for the genome')
    movielens.add_argument('--movies', help='item::title::genres file')
    movielens.add_argument('--threshold', type=float, help='minimum tag relevance kept (inclusive)')
    movielens.add_argument('--out', required=True, help='dataset directory to write')

    stackexchange = sources.add_parser('stackexchange', help='Posts.xml (+ Users.xml)')
    _common(stackexchange)
    stackexchange.add_argument('--posts', required=True)
    stackexchange.add_argument('--users')
    stackexchange.add_argument('--ratio', type=int, dest='negative_ratio', help='negatives per positive')
    stackexchange.add_argument('--vocabulary-size', type=int, dest='vocabulary_size')
    stackexchange.add_argument('--out', required=True)

    train = commands.add_parser('train', help='fit a factorisation model and save it')
    _common(train)
    _training(train)
    train.add_argument('--dataset', required=True)
    train.add_argument('--model', dest='variant', default='lightfm-tags',
                       choices=[v for v in MODEL_VARIANTS if not v.startswith('lsi')])
    train.add_argument('--resume', help='continue from a saved model file')
    train.add_argument('--out', required=True, help='model file to write')
    train.add_argument('--history', help='history table (default: <out>.history.tsv)')

    experiment = commands.add_parser('experiment', help='repeated split/train/evaluate runs')
    _common(experiment)
    _training(experiment)
    experiment.add_argument('--dataset', required=True)
    experiment.add_argument('--model', dest='variants', type=name_list, default=['lightfm-tags'],
                            help='comma-separated variants')
    experiment.add_argument('--split', choices=SPLIT_KINDS, default='cold')
    experiment.add_argument('--reps', type=int, dest='repetitions')
    experiment.add_argument('--workers', type=int, default=1, help='repetitions run in parallel')
    experiment.add_argument('--out', help='also write the results table here')

    sweep = commands.add_parser('sweep', help='accuracy against latent dimensionality')
    _common(sweep)
    _training(sweep)
    sweep.add_argument('--dataset', required=True)
    sweep.add_argument('--model', dest='variants', type=name_list, default=['lightfm-tags', 'lsi-lr', 'lsi-up'])
    sweep.add_argument('--dims', type=int_list, required=True, help='e.g. 2,4,8,16,32,64')
    sweep.add_argument('--split', choices=SPLIT_KINDS, default='cold')
    sweep.add_argument('--reps', type=int, dest='repetitions')
    sweep.add_argument('--out')

    similar = commands.add_parser('similar', help='nearest tags or items by embedding cosine')
    _common(similar)
    similar.add_argument('--model', dest='model_path', required=True)
    target = similar.add_mutually_exclusive_group(required=True)
    target.add_argument('--tag', help='item feature name')
    target.add_argument('--item', help='item id')
    similar.add_argument('--k', type=int, default=10)
    similar.add_argument('--approximate', choices=('exact', 'rp', 'lsh'), default='exact')
    similar.add_argument('--trees', type=int, default=20)
    similar.add_argument('--leaf-capacity', type=int, dest='leaf_capacity', default=256)
    similar.add_argument('--bits', type=int, default=16)

    synth = commands.add_parser('synth', help='generate the planted-tag-group fixture')
    _common(synth)
    synth.add_argument('--spec', type=parse_key_values, help='key=value,... overrides')
    synth.add_argument('--users', type=int, dest='n_users')
    synth.add_argument('--items', type=int, dest='n_items')
    synth.add_argument('--n-tags', type=int, dest='n_tags')
    synth.add_argument('--groups', type=int, dest='n_groups')
    synth.add_argument('--tags-per-item', type=int, dest='tags_per_item')
    synth.add_argument('--interactions-per-user', type=int, dest='interactions_per_user')
    synth.add_argument('--noise', type=float)
    synth.add_argument('--words-per-user', type=int, dest='words_per_user')
    synth.add_argument('--out', required=True)

    features = commands.add_parser('features', help='dump a saved feature mapping')
    _common(features)
    features.add_argument('--model', dest='model_path', required=True)
    features.add_argument('--side', choices=('user', 'item'), default='item')

    return parser

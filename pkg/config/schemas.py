"""Validation schemas for option bundles coming from flags, files and callers"""

from pathlib import Path

from marshmallow import Schema, fields, validate, validates, validates_schema, ValidationError as SchemaError
from pathvalidate import validate_filepath, ValidationError as PathError

MODEL_VARIANTS = ('mf', 'lsi-lr', 'lsi-up', 'lightfm-tags', 'lightfm-tags-ids', 'lightfm-tags-about')
SPLIT_KINDS = ('warm', 'cold')
COMMANDS = ('ingest', 'train', 'experiment', 'sweep', 'similar', 'synth', 'features')


class ExistingPathField(fields.String):

    def _deserialize(self, value, attr, data, **kwargs):
        value = super()._deserialize(value, attr, data, **kwargs)
        if not Path(value).exists():
            raise SchemaError(f"Path does not exist: {value}")
        return value


class OutputPathField(fields.String):

    def _deserialize(self, value, attr, data, **kwargs):
        value = super()._deserialize(value, attr, data, **kwargs)
        try:
            validate_filepath(value, platform='auto')
        except PathError as e:
            raise SchemaError(f"Invalid output path {value!r}: {e}")
        return value


class TrainConfigSchema(Schema):

    base_learning_rate = fields.Float(
        load_default=0.05,
        validate=validate.Range(min=0.0, min_inclusive=False),
        error_messages={"invalid": "Learning rate must be a number"}
    )
    epochs_max = fields.Integer(load_default=50, validate=validate.Range(min=1))
    threads = fields.Integer(load_default=4, validate=validate.Range(min=1))
    early_stop_patience = fields.Integer(load_default=2, validate=validate.Range(min=1))
    rng_seed = fields.Integer(load_default=42, validate=validate.Range(min=0))


class SyntheticSpecSchema(Schema):

    n_users = fields.Integer(load_default=2000, validate=validate.Range(min=2))
    n_items = fields.Integer(load_default=500, validate=validate.Range(min=5))
    n_tags = fields.Integer(load_default=50, validate=validate.Range(min=2))
    n_groups = fields.Integer(load_default=5, validate=validate.Range(min=2))
    tags_per_item = fields.Integer(load_default=3, validate=validate.Range(min=1))
    interactions_per_user = fields.Integer(load_default=20, validate=validate.Range(min=2))
    noise = fields.Float(load_default=0.1, validate=validate.Range(min=0.0))
    words_per_user = fields.Integer(load_default=5, validate=validate.Range(min=0))
    seed = fields.Integer(load_default=0, validate=validate.Range(min=0))

    @validates_schema
    def validate_shape(self, data, **kwargs):
        if data['n_tags'] % data['n_groups']:
            raise SchemaError("n_tags must be a multiple of n_groups", field_name='n_tags')
        if data['tags_per_item'] > data['n_tags'] // data['n_groups']:
            raise SchemaError("tags_per_item cannot exceed the tags available in one group", field_name='tags_per_item')
        if data['interactions_per_user'] > data['n_items']:
            raise SchemaError("interactions_per_user cannot exceed n_items", field_name='interactions_per_user')


class RunConfigSchema(Schema):

    command = fields.String(required=True, validate=validate.OneOf(COMMANDS))
    dataset = ExistingPathField(load_default=None, allow_none=True)
    model_path = ExistingPathField(load_default=None, allow_none=True)
    variants = fields.List(fields.String(validate=validate.OneOf(MODEL_VARIANTS)), load_default=list)
    split = fields.String(load_default='cold', validate=validate.OneOf(SPLIT_KINDS))
    latent_dim = fields.Integer(load_default=64, validate=validate.Range(min=1))
    dims = fields.List(fields.Integer(validate=validate.Range(min=1)), load_default=list)
    repetitions = fields.Integer(load_default=10, validate=validate.Range(min=1))
    seed = fields.Integer(load_default=42, validate=validate.Range(min=0))
    out = OutputPathField(load_default=None, allow_none=True)

    @validates("dims")
    def validate_dims(self, value, **kwargs):
        if list(value) != sorted(set(value)):
            raise SchemaError("dims must be strictly ascending")

    @validates_schema
    def validate_required_paths(self, data, **kwargs):
        needs_dataset = {'train', 'experiment', 'sweep'}
        needs_model = {'similar', 'features'}
        if data['command'] in needs_dataset and not data.get('dataset'):
            raise SchemaError(f"--dataset is required for '{data['command']}'", field_name='dataset')
        if data['command'] in needs_model and not data.get('model_path'):
            raise SchemaError(f"--model is required for '{data['command']}'", field_name='model_path')


def load_or_raise(schema: Schema, payload: dict) -> dict:
    """Run a schema and convert its failures into the package ValidationError."""
    from utils.exceptions import ValidationError

    try:
        return schema.load(payload)
    except SchemaError as e:
        raise ValidationError(f"Invalid options: {e.messages}", details={'errors': e.messages}) from e

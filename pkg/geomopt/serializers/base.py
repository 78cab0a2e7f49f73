from collections.abc import Mapping

from rest_framework import serializers


class StrictSerializer(serializers.Serializer):
    """
    Serializer that rejects keys it does not declare, at every nesting level.

    Nested sections declared with ``default=dict`` are validated as empty
    sections when missing, so their own field defaults apply.
    """

    def to_internal_value(self, data):
        errors = {}
        if isinstance(data, Mapping):
            for key in sorted(set(data) - set(self.fields)):
                errors[key] = ['Unknown field.']
            data = dict(data)
            for name, field in self.fields.items():
                if isinstance(field, serializers.Serializer) and field.default is dict:
                    data.setdefault(name, {})
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            if isinstance(exc.detail, Mapping):
                errors.update(exc.detail)
            else:
                errors.setdefault('non_field_errors', []).extend(exc.detail)
            raise serializers.ValidationError(errors)
        if errors:
            raise serializers.ValidationError(errors)
        return value


def flatten_errors(errors, prefix=''):
    """Turn nested serializer errors into 'dotted.path: message' lines."""
    lines = []
    if isinstance(errors, Mapping):
        for key, value in errors.items():
            path = prefix if key == 'non_field_errors' else (f'{prefix}.{key}' if prefix else str(key))
            lines.extend(flatten_errors(value, path))
    elif isinstance(errors, list) and errors and all(isinstance(e, str) for e in errors):
        lines.extend(f'{prefix or "config"}: {message}' for message in errors)
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if value:
                lines.extend(flatten_errors(value, f'{prefix}[{index}]'))
    elif errors:
        lines.append(f'{prefix or "config"}: {errors}')
    return lines


def describe_schema(serializer):
    """Field tree of a serializer as plain data, for publishing the config schema."""
    if isinstance(serializer, serializers.ListSerializer):
        return [describe_schema(serializer.child)]
    if isinstance(serializer, serializers.Serializer):
        return {name: describe_schema(field) for name, field in serializer.fields.items()}
    if isinstance(serializer, serializers.ListField):
        return [describe_schema(serializer.child)]
    if isinstance(serializer, serializers.DictField):
        return {'<key>': describe_schema(serializer.child)}
    description = {'type': type(serializer).__name__.replace('Field', '').lower()}
    if isinstance(serializer, serializers.ChoiceField):
        description['choices'] = list(serializer.choices)
    for attr in ('min_value', 'max_value'):
        if getattr(serializer, attr, None) is not None:
            description[attr] = getattr(serializer, attr)
    description['required'] = serializer.required
    if serializer.default is not serializers.empty:
        default = serializer.default
        description['default'] = default() if callable(default) else default
    return description

from fractions import Fraction

from django import forms

from core.exceptions import DegenerateLatticeError
from core.serializers import parse_rational

from .lattice import IntegerLattice


def integer_rows(value, name: str = "matrix") -> list[list[int]]:
    """A JSON list of equally long lists of integers."""
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise forms.ValidationError(f"{name} must be a list of rows.")
    width = len(value[0]) if value else 0
    rows = []
    for row in value:
        if len(row) != width:
            raise forms.ValidationError(f"{name} rows must all have length {width}.")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in row):
            raise forms.ValidationError(f"{name} entries must be integers.")
        rows.append([int(x) for x in row])
    return rows


def square_rows(value, name: str = "matrix") -> list[list[int]]:
    rows = integer_rows(value, name)
    if any(len(row) != len(rows) for row in rows):
        raise forms.ValidationError(f"{name} must be square.")
    return rows


def rational_rows(value, name: str = "vectors") -> list[list[Fraction]]:
    """Vectors whose entries are integers or exact "p/q" strings."""
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise forms.ValidationError(f"{name} must be a list of vectors.")
    try:
        return [[parse_rational(x) for x in row] for row in value]
    except ValueError as exc:
        raise forms.ValidationError(str(exc))


class LatticeForm(forms.Form):
    """Lattice JSON: {"label": string, "gram": [[int]]}."""

    label = forms.CharField(required=False, max_length=200)
    gram = forms.JSONField()

    def clean_label(self):
        return (self.cleaned_data.get("label") or "").strip()

    def clean_gram(self):
        rows = square_rows(self.cleaned_data.get("gram"), "gram")
        if any(rows[i][j] != rows[j][i] for i in range(len(rows)) for j in range(i)):
            raise forms.ValidationError("gram must be symmetric.")
        return rows

    def clean(self):
        cleaned_data = super().clean()
        rows = cleaned_data.get("gram")
        if rows is not None:
            try:
                cleaned_data["lattice"] = IntegerLattice.from_rows(
                    rows, label=cleaned_data.get("label", "")
                )
            except DegenerateLatticeError as exc:
                raise forms.ValidationError(str(exc))
        return cleaned_data


class SpanForm(forms.Form):
    """Integral coordinate vectors, e.g. the span of a complement."""

    vectors = forms.JSONField()

    def clean_vectors(self):
        return integer_rows(self.cleaned_data.get("vectors"), "vectors")


class GlueVectorsForm(forms.Form):
    vectors = forms.JSONField()

    def clean_vectors(self):
        return rational_rows(self.cleaned_data.get("vectors"))


class MatrixForm(forms.Form):
    matrix = forms.JSONField()

    def clean_matrix(self):
        return square_rows(self.cleaned_data.get("matrix"), "matrix")

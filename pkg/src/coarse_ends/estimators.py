"""scikit-learn style front ends.

Only the parts that fit the fit/predict shape are wrapped: K-chain
clustering of integer point clouds, and end classification of coarse
sequences over a fixed pointed space.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .chains import k_chain_components
from .classify import classify_sequence
from .ends import sigma
from .errors import InputError
from .extdist import parse
from .sequences.core import CoarseSequence, seq_from_json
from .sequences.distance import Params
from .space import FiniteModel
from .zoo import Lattice, space_from_json

_METRICS = ("l1", "linf")


class KChainComponents(ClusterMixin, BaseEstimator):
    """Cluster integer points into K-chain components.

    Parameters
    ----------
    K : int or "p/q" string
        Largest allowed step inside a chain.
    metric : {"l1", "linf"}
        Lattice norm used for distances.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Component label per row, numbered in order of first appearance.
    n_components_ : int
    """

    def __init__(self, K=1, metric="l1"):
        self.K = K
        self.metric = metric

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.int64, ensure_min_features=1)
        if self.metric not in _METRICS:
            raise InputError(f"metric must be one of {_METRICS}, got {self.metric!r}")
        K = parse(self.K)
        dim = X.shape[1]
        points = [tuple(int(v) for v in r) for r in X]
        geometry = Lattice(dim, self.metric)
        unique = list(dict.fromkeys(points))
        model = FiniteModel(unique, geometry.dist, geometry=geometry)
        part = k_chain_components(model, K)
        relabel: dict = {}
        labels = np.empty(len(points), dtype=np.int64)
        for i, p in enumerate(points):
            cid = part.class_of[p]
            labels[i] = relabel.setdefault(cid, len(relabel))
        self.labels_ = labels
        self.n_components_ = len(relabel)
        self.n_features_in_ = dim
        return self


class SequentialEnds(BaseEstimator):
    """Classify coarse sequences into sequential ends of a pointed space.

    ``fit`` takes a list of sequences (objects or JSON descriptions) and
    stores the partition; ``predict`` classifies further sequences against
    the fitted tower. This is not a statistical estimator: there is no
    ``score`` and the input is not an array.

    Attributes
    ----------
    report_ : SigmaReport
    labels_ : ndarray of int, -1 for rejected or unclassified inputs
    n_ends_ : int
        Number of classes found (a lower bound on the number of ends).
    """

    def __init__(self, space=None, K=None, N=256, M=1024, radii=None, horizons=None, auto_representatives=True):
        self.space = space
        self.K = K
        self.N = N
        self.M = M
        self.radii = radii
        self.horizons = horizons
        self.auto_representatives = auto_representatives

    def _space(self):
        if self.space is None:
            raise InputError("SequentialEnds needs a space")
        return space_from_json(self.space) if isinstance(self.space, dict) else self.space

    def _params(self) -> Params:
        return Params(
            N=self.N,
            M=self.M,
            K=None if self.K is None else parse(self.K),
            radii=None if self.radii is None else tuple(parse(r) for r in self.radii),
            horizons=None if self.horizons is None else tuple(parse(h) for h in self.horizons),
        )

    def _seqs(self, X, space):
        return [x if isinstance(x, CoarseSequence) else seq_from_json(x, space) for x in X]

    def fit(self, X, y=None):
        space = self._space()
        report = sigma(space, self._seqs(X, space), self._params(), self.auto_representatives, crosscheck=False)
        self.report_ = report
        self.classes_ = list(report.classes)
        self.labels_ = self._labels(report.assignments)
        self.n_ends_ = report.class_count
        return self

    def _labels(self, assignments):
        index = {tid: k for k, tid in enumerate(self.classes_)}
        return np.array(
            [index.get(a.id, -1) if a is not None and a.known else -1 for a in assignments], dtype=np.int64
        )

    def predict(self, X):
        check_is_fitted(self, "report_")
        space = self._space()
        out = []
        for s in self._seqs(X, space):
            try:
                out.append(classify_sequence(s, self.report_.end_report))
            except InputError:
                out.append(None)
        return self._labels(out)

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

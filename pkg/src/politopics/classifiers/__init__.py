"""Binary one-vs-all topic detector heads: logistic, SVM (SMO) and random forest."""

from .base import LabeledSet, predict_label, predict_score, topic_seed
from .forest import RfConfig, RfModel, train_rf
from .logistic import LogisticConfig, LogisticModel, train_logistic
from .model_io import load_model, save_model
from .svm import SvmModel, train_svm

__all__ = [
    "LabeledSet",
    "LogisticConfig",
    "LogisticModel",
    "RfConfig",
    "RfModel",
    "SvmModel",
    "load_model",
    "predict_label",
    "predict_score",
    "save_model",
    "topic_seed",
    "train_logistic",
    "train_rf",
    "train_svm",
]

"""Nilpotent-matrix cryptosystem and cryptanalysis harness."""

from .codec import Ciphertext, DigitMessage, decrypt_message, digits_of, encrypt_message
from .keyschedule import SchemeParams, SharedMatrixKey, build_shared_key
from .modarith import DHKeyPair, DHParams, dh_public, dh_shared

__all__ = [
    "Ciphertext",
    "DHKeyPair",
    "DHParams",
    "DigitMessage",
    "SchemeParams",
    "SharedMatrixKey",
    "build_shared_key",
    "decrypt_message",
    "dh_public",
    "dh_shared",
    "digits_of",
    "encrypt_message",
]

__version__ = "0.1.0"

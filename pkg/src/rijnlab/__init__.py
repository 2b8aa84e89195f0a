"""rijnlab: Rijndael-b integral-cryptanalysis workbench."""

__version__ = "0.1.0"

from .cipher import CipherParams, decrypt, decrypt_reduced, encrypt, encrypt_reduced, key_schedule

__all__ = [
    "CipherParams",
    "key_schedule",
    "encrypt",
    "decrypt",
    "encrypt_reduced",
    "decrypt_reduced",
    "__version__",
]

"""Domain-separation tags, KDF FC bytes and protocol defaults.

Single source of truth for every constant that appears on both sides of a
derivation. The FC values are local to this model: real networks take theirs
from 3GPP TS 33.501 Annex A, which this project does not reproduce.
"""

# One-byte domain tags for the reference authentication algorithm family.
# All eight functions are HMAC-SHA-256 under the subscriber key K with the
# tag prepended, truncated to the documented width.
TAG_F1 = 0x01        # MAC-A (64 bit)
TAG_F1_STAR = 0x02   # MAC-S, used inside AUTS (64 bit)
TAG_F2 = 0x03        # XRES (128 bit)
TAG_F3 = 0x04        # CK (128 bit)
TAG_F4 = 0x05        # IK (128 bit)
TAG_F5 = 0x06        # AK (48 bit)
TAG_F5_STAR = 0x07   # AK*, conceals SQN_MS inside AUTS (48 bit)

# Session-protection constructions (keystream generator and 32-bit MAC).
TAG_KEYSTREAM = 0x10
TAG_MAC32 = 0x11

# FC bytes for the generic KDF. Arbitrary but fixed; documented in README.
FC_XRES_STAR = 0x6B
FC_K_AUSF = 0x6C
FC_K_SEAF = 0x6D
FC_K_AMF = 0x6E
FC_K_GNB = 0x6F
FC_OPERATIONAL = 0x70
FC_K_AMF_HORIZONTAL = 0x71  # reserved for mobility; not derived here

# Algorithm-type bytes for the operational key pair derivation.
ALGO_TYPE_NAS_ENC = 0x01
ALGO_TYPE_NAS_INT = 0x02
ALGO_TYPE_RRC_ENC = 0x03
ALGO_TYPE_RRC_INT = 0x04
ALGO_TYPE_UP_ENC = 0x05
ALGO_TYPE_UP_INT = 0x06

# Single ciphering/integrity algorithm identity used by the model.
ALGO_ID_DEFAULT = 0x01

# Bearer identities per stratum (5-bit field).
BEARER_NAS = 0x01
BEARER_RRC = 0x02
BEARER_UP = 0x03

DIRECTION_UPLINK = 0
DIRECTION_DOWNLINK = 1

# Default Authentication Management Field value (separation bit set).
AMF_DEFAULT = b"\x80\x00"

# SQN acceptance: a challenge SQN must exceed the highest accepted value by
# at most this jump.
SQN_MAX_JUMP = 1 << 28
SQN_BITS = 48
SQN_MAX = (1 << SQN_BITS) - 1

RAND_LEN = 16
AUTN_LEN = 16
AUTS_LEN = 14
RES_LEN = 16
MAC_A_LEN = 8
AK_LEN = 6
KEY128_LEN = 16
KEY256_LEN = 32
GUTI_LEN = 10
SUPI_MAX_LEN = 64

# SUCI protection scheme identifiers.
SCHEME_ECIES_X25519 = 0x01
SCHEME_PQ_SIM_KEM = 0x02

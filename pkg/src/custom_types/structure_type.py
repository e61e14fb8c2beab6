from enum import Enum


class StructureType(Enum):
    FCC = "fcc"
    HCP = "hcp"
    BCC = "bcc"
    UNCLASSIFIED = "unclassified"

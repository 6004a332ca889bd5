from typing import List

from pydantic import BaseModel


class SystemFile(BaseModel):
    """x' = A x + B u with entries written in the expression grammar."""

    name: str = "system"
    parameters: List[str]
    A: List[List[str]]
    B: List[List[str]]

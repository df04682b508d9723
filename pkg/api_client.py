import httpx
import asyncio
import json
from typing import Any, Dict, List, Optional


class EngineClient:
    """Client for interacting with the reasoning engine API"""

    def __init__(self, base_url: str = "http://localhost:8000", client: Optional[httpx.AsyncClient] = None,
                 timeout: float = 30.0):
        self.base_url = base_url
        self.client = client or httpx.AsyncClient(timeout=timeout)

    async def _post(self, path: str, payload: Dict[str, Any]) -> Dict[str, Any]:
        response = await self.client.post(f"{self.base_url}{path}", json=payload)
        response.raise_for_status()
        return response.json()

    async def parse(self, theory: str) -> Dict[str, Any]:
        return await self._post("/parse", {"theory": theory})

    async def morleyize(self, theory: str, target: str = "regular", extras: Optional[List[str]] = None) -> Dict[str, Any]:
        return await self._post("/morleyize", {"theory": theory, "target": target, "extras": extras or []})

    async def chase(self, theory: str, diagram: Optional[Dict[str, Any]] = None,
                    fuel: Optional[int] = None) -> Dict[str, Any]:
        """Chase a diagram (empty when omitted) under a regular theory"""
        return await self._post("/chase", {"theory": theory, "diagram": diagram, "fuel": fuel})

    async def prove(self, theory: str, sequent: str, max_depth: Optional[int] = None) -> Dict[str, Any]:
        return await self._post("/prove", {"theory": theory, "sequent": sequent, "max_depth": max_depth})

    async def check_certificates(self, theory: str, sequent: str,
                                 certificates: List[Dict[str, Any]]) -> Dict[str, Any]:
        return await self._post("/check-cert", {"theory": theory, "sequent": sequent,
                                                "certificates": certificates})

    async def force(self, theory: str, query: str, kind: str = "beth_star",
                    depth: Optional[int] = None) -> Dict[str, Any]:
        return await self._post("/force", {"theory": theory, "query": query, "kind": kind, "depth": depth})

    async def oracle(self, theory: str, sequent: str, max_size: Optional[int] = None) -> Dict[str, Any]:
        return await self._post("/oracle", {"theory": theory, "sequent": sequent, "max_size": max_size})

    async def health_check(self) -> Dict[str, Any]:
        """Check API health"""
        response = await self.client.get(f"{self.base_url}/health")
        response.raise_for_status()
        return response.json()

    async def close(self):
        """Close the HTTP client"""
        await self.client.aclose()


# Demo usage
async def demo():
    """Prove a goal over the depth-2 fan and check the returned certificates"""
    client = EngineClient()
    theory = """
rel P/0, P0/0, P1/0, P00/0, P01/0, P10/0, P11/0, B/0.
axiom true |- P.
axiom P |- P0 | P1.
axiom P0 |- P00 | P01.
axiom P1 |- P10 | P11.
axiom P00 |- B.
axiom P01 |- B.
axiom P10 |- B.
axiom P11 |- B.
"""
    try:
        print(json.dumps(await client.health_check(), indent=2))
        proof = await client.prove(theory, "true |- B")
        print(f"verdict: {proof['verdict']} at depth {proof['depth']}")
        if proof["certificates"]:
            check = await client.check_certificates(theory, "true |- B", proof["certificates"])
            print(f"certificate accepted: {check['ok']}")
    finally:
        await client.close()


if __name__ == "__main__":
    asyncio.run(demo())

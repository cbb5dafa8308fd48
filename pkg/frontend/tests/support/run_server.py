"""Run the interaction service on an OS-assigned port and print it.

Usage: python3 run_server.py CKPT SPACE
"""

import asyncio
import sys

from posespace.musicspace import load_space
from posespace.nets import Checkpoint
from posespace.server import PoseSpaceServer


async def main() -> None:
    server = PoseSpaceServer(Checkpoint.load(sys.argv[1]), load_space(sys.argv[2]))
    instance = await server.start("127.0.0.1", 0)
    print(f"PORT {server.port}", flush=True)
    async with instance:
        await instance.serve_forever()


if __name__ == "__main__":
    asyncio.run(main())

"""
Download LIBSVM binary-classification datasets (a1a, a2a, ...) into data/libsvm/.

Run with: uv run -m src.l2gd.loader.fetch a1a a2a
"""
import argparse
import asyncio
import logging

from httpx import AsyncClient, HTTPError

from src.l2gd.errors import DataError
from src.l2gd.loader.store import DatasetFileSpec, DatasetFileStore
from src.l2gd.loader.utils import DATA_ROOT

BASE_URL = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/"


async def fetch_text(client: AsyncClient, url: str) -> str:
    logging.info("Calling %s", url)
    try:
        response = await client.get(url=url)
        response.raise_for_status()
    except HTTPError as exc:
        raise DataError(f"download failed for {url}: {exc}") from exc
    return response.text


async def fetch_libsvm(client: AsyncClient, name: str, data_root: str = DATA_ROOT) -> str:
    """Return the path of dataset `name`, downloading it first if it is not on disk."""
    store = DatasetFileStore(DatasetFileSpec(name=name, data_dir=data_root, url=BASE_URL + name))

    async def _fetch(url: str) -> str:
        return await fetch_text(client, url)

    await store.get_or_fetch(_fetch)
    return store.path


async def fetch_all(names: list[str], data_root: str = DATA_ROOT) -> list[str]:
    async with AsyncClient(follow_redirects=True, timeout=60.) as client:
        return [await fetch_libsvm(client, name, data_root) for name in names]


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    parser = argparse.ArgumentParser(description='Download LIBSVM binary datasets')
    parser.add_argument('names', nargs='*', default=['a1a', 'a2a'], help='dataset file names')
    parser.add_argument('--data-root', default=DATA_ROOT, help='target directory')
    args = parser.parse_args()
    for path in asyncio.run(fetch_all(args.names, args.data_root)):
        logging.info(f"Ready: {path}")

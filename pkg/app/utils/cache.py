"""
Caching utilities for the plane Lie algebra toolkit.

Saturations and coefficient tables are pure functions of hashable arguments, so
their results are memoised in process-local LRU caches.
"""

import functools
import logging
from typing import Any, Callable, List, Optional, TypeVar

from cachetools import LRUCache
from cachetools.keys import hashkey

from app.utils.config import get_settings

logger = logging.getLogger(__name__)

# Define a generic type for the return value of the decorated function
T = TypeVar('T')

# Every cache created by cache_result, so clear_cache can reach them all
_REGISTRY: List[LRUCache] = []


def generate_cache_key(func_name: str, args: tuple, kwargs: dict) -> tuple:
    """
    Generate a cache key based on function name and arguments.

    Args:
        func_name: Name of the function
        args: Positional arguments (must be hashable)
        kwargs: Keyword arguments (must be hashable)

    Returns:
        Hashable cache key
    """
    return hashkey(func_name, *args, **kwargs)


def cache_result(maxsize: Optional[int] = None) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """
    Cache the result of a pure function call in memory.

    The wrapped function accepts an extra ``cache_enabled=False`` keyword to
    bypass the cache for one call.

    Args:
        maxsize: Number of results kept; defaults to PLANE_LIE_CACHE_SIZE

    Returns:
        Decorator function
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        store: LRUCache = LRUCache(maxsize=maxsize or get_settings().cache_size)
        _REGISTRY.append(store)

        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            # Check if caching is disabled via kwargs
            cache_enabled = kwargs.pop('cache_enabled', True)

            if not cache_enabled:
                return func(*args, **kwargs)

            cache_key = generate_cache_key(func.__name__, args, kwargs)
            try:
                result = store[cache_key]
                logger.debug("Cache hit for %s", func.__name__)
                return result
            except KeyError:
                pass

            # Cache miss, call the function
            result = func(*args, **kwargs)
            store[cache_key] = result
            logger.debug("Cached result for %s", func.__name__)
            return result

        wrapper.cache = store  # type: ignore[attr-defined]
        return wrapper

    return decorator


def clear_cache() -> None:
    """Clear every cache created by cache_result."""
    for store in _REGISTRY:
        store.clear()
    logger.debug("Cleared %d caches", len(_REGISTRY))

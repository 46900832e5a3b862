# plane_lie_toolkit tests package
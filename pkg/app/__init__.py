# plane_lie_toolkit app package
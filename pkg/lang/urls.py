from django.urls import path

from .views import GatesAPIView, TypecheckAPIView

urlpatterns = [
    path('gates/', GatesAPIView.as_view()),
    path('typecheck/', TypecheckAPIView.as_view()),
]
